"""Test the fairino.cli module."""

import json

import pytest

from fairino.cli import (
    EXIT_INPUT_ERROR,
    EXIT_NEGATIVE,
    EXIT_NOT_APPLICABLE,
    EXIT_OK,
    outcome_to_dict,
    run_command,
)
from fairino.model import Instance, serialize_instance
from fairino.reductions import gen_counterexample
from fairino.type_definitions import PartialAllocation, SolveOutcome


@pytest.fixture
def write(tmp_path):
    """Write a file into the temporary directory and return its path as a string."""

    def _write(name, content):
        path = tmp_path / name
        path.write_text(content if isinstance(content, str) else json.dumps(content), encoding="utf-8")
        return str(path)

    return _write


@pytest.fixture
def nash_instance(write):
    """The binary family whose Nash welfare optima all fail EF1, as an instance file."""
    return write("instance.json", serialize_instance(gen_counterexample("mnw_not_ef1")))


def run_json(capsys, *argv):
    """Run a command with JSON output and return its exit code and parsed output."""
    code = run_command([*argv, "--json"])
    return code, json.loads(capsys.readouterr().out)


def test_solve_writes_the_witness(capsys, tmp_path, nash_instance):
    """Test solving EF1 and PO and checking the written witness."""
    witness = str(tmp_path / "witness.json")
    code, data = run_json(capsys, "solve", "--instance", nash_instance, "--property", "ef1", "--po", "-o", witness)
    assert code == EXIT_OK
    assert data["status"] == "witness"
    assert data["allocation"] == {"bundles": [["g1"], ["g2", "g3", "g4"], ["f1", "f2", "f3", "f4"]]}
    args = ["check", "--instance", nash_instance, "--allocation", witness, "--property", "ef1", "--property", "po"]
    code, data = run_json(capsys, *args)
    assert code == EXIT_OK
    assert data["holds"] is True
    assert sorted(data["reports"]) == ["ef1", "po"]


def test_solve_text_output(capsys, nash_instance):
    """Test the human readable outcome."""
    assert run_command(["solve", "--instance", nash_instance, "--property", "mnw"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("witness: ")
    assert "  agent 1: g1, g2" in out


def test_check_reports_violations(capsys, write, nash_instance):
    """Test that the Nash welfare optimum fails EF1 with exit code 1."""
    allocation = write("allocation.json", {"bundles": [["g1", "g2"], ["g3", "g4"], ["f1", "f2", "f3", "f4"]]})
    code, data = run_json(capsys, "check", "--instance", nash_instance, "--allocation", allocation)
    assert code == EXIT_NEGATIVE
    assert data["holds"] is False
    assert [v["agent"] for v in data["reports"]["ef1"]["violations"]] == [1]


def test_oracle_command(capsys, nash_instance):
    """Test that no Nash welfare optimum is EF1."""
    code, data = run_json(capsys, "oracle", "--instance", nash_instance, "--properties", "mnw, ef1")
    assert code == EXIT_NEGATIVE
    assert data == {"status": "none_exists", "note": "no completion satisfies mnw, ef1", "allocation": None}


def test_oracle_budget(capsys, write):
    """Test that a search beyond the budget exits with code 3."""
    instance = write("instance.json", serialize_instance(Instance.from_values([[2, 1], [1, 2]])))
    code = run_command(["oracle", "--instance", instance, "--properties", "ef1", "--budget", "2"])
    assert code == EXIT_NOT_APPLICABLE
    assert capsys.readouterr().out.startswith("not_applicable: ")


def test_mms_value_command(capsys, write):
    """Test the maximin shares of the lexicographic counterexample."""
    instance = write("instance.json", serialize_instance(gen_counterexample("no_mms_lex")))
    code, data = run_json(capsys, "mms-value", "--instance", instance)
    assert code == EXIT_OK
    assert data["mu"] == [6, 7]
    assert len(data["partitions"]) == 2
    assert run_command(["mms-value", "--instance", instance, "--bruteforce"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines() == ["agent 1: 6", "agent 2: 7"]


def test_mms_value_budget(capsys, write):
    """Test that the brute force beyond its budget exits with code 3."""
    instance = write("instance.json", serialize_instance(Instance.from_values([[1, 2], [2, 1]])))
    assert run_command(["mms-value", "--instance", instance, "--budget", "1"]) == EXIT_NOT_APPLICABLE
    assert "exceed" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv, goods",
    [
        (["--family", "two_agent_ef1", "--weights", "1,1,2"], ["w1", "w2", "w3", "f1", "f2"]),
        (["--family", "equitable_coloring", "--vertices", "a,b", "--edge", "a,b"], ["v:a", "v:b", "d1", "d2"]),
        (
            ["--family", "no_alpha_mms_binary", "--alpha", "1/2"],
            ["g1", "g2", *[f"g{i}_{j}" for i in (1, 2, 3) for j in (1, 2)]],
        ),
        (["--family", "no_mms_lex"], ["g1", "g2", "f1", "f2"]),
    ],
)
def test_generate_prints_instances(capsys, argv, goods):
    """Test generated instances on stdout."""
    assert run_command(["generate", *argv]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["goods"] == goods


def test_generate_to_file(tmp_path, capsys):
    """Test writing a rainbow coloring gadget to a file."""
    path = tmp_path / "rainbow.json"
    argv = ["generate", "--family", "rainbow_coloring", "--vertices", "a,b", "--hyperedge", "a,b", "-o", str(path)]
    assert run_command(argv) == EXIT_OK
    assert capsys.readouterr().out == ""
    assert json.loads(path.read_text(encoding="utf-8"))["class"] == "lexicographic"


@pytest.mark.parametrize(
    "argv",
    [
        ["--family", "two_agent_ef1", "--weights", "1,x"],
        ["--family", "two_agent_ef1", "--weights", "1,2"],
        ["--family", "equitable_coloring", "--vertices", "a,b", "--edge", "a"],
        ["--family", "no_alpha_mms_binary", "--x", "1"],
        ["--family", "no_mms_lex", "--ell", "3"],
    ],
)
def test_generate_errors(capsys, argv):
    """Test that invalid generator parameters exit with code 2."""
    assert run_command(["generate", *argv]) == EXIT_INPUT_ERROR
    assert capsys.readouterr().err.startswith("fairino: ")


def test_verify_command(capsys):
    """Test a short sweep of the lexicographic MMS solver."""
    code, data = run_json(capsys, "verify", "--solver", "mms-lex", "--cases", "20", "--seed", "4")
    assert code == EXIT_OK
    assert data == {"solver": "mms-lex", "cases": 20, "seed": 4, "mismatches": []}


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["solve", "--instance", "instance.json"],
        ["verify", "--solver", "bogus"],
    ],
)
def test_usage_errors(capsys, argv):
    """Test that argument errors exit with code 2."""
    assert run_command(argv) == EXIT_INPUT_ERROR


def test_version(capsys):
    """Test the version flag."""
    assert run_command(["--version"]) == EXIT_OK
    assert capsys.readouterr().out.startswith("fairino ")


@pytest.mark.parametrize(
    "content, message",
    [
        (None, "Cannot read"),
        ("{not json", "Malformed JSON"),
        ({"agents": 1, "goods": ["a"], "class": "binary", "valuations": [[2]]}, "binary"),
        ({"agents": 1, "goods": ["a"], "class": "binary", "valuations": [[1]], "agent_names": 5}, "agent_names"),
    ],
)
def test_input_errors(capsys, tmp_path, write, content, message):
    """Test that unreadable or invalid instance files exit with code 2."""
    path = str(tmp_path / "missing.json") if content is None else write("instance.json", content)
    assert run_command(["solve", "--instance", path, "--property", "ef1"]) == EXIT_INPUT_ERROR
    assert message in capsys.readouterr().err


def test_unknown_property(capsys, nash_instance):
    """Test that an unknown property exits with code 2."""
    assert run_command(["solve", "--instance", nash_instance, "--property", "envy"]) == EXIT_INPUT_ERROR


def test_outcome_to_dict():
    """Test the JSON form of solver outcomes."""
    inst = Instance.from_values([[1, 1]])
    found = SolveOutcome.found(PartialAllocation.from_bundles([{1, 0}]), "greedy")
    expected = {"status": "witness", "note": "greedy", "allocation": {"bundles": [["g0", "g1"]]}}
    assert outcome_to_dict(inst, found) == expected
    assert outcome_to_dict(inst, SolveOutcome.none_exists("none"))["allocation"] is None
