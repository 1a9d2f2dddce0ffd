"""Test the fairino.report module."""

import json

import pytest

from fairino.checkers import check_ef1, check_prop
from fairino.cli import run_command
from fairino.model import Instance, serialize_instance
from fairino.type_definitions import PartialAllocation


pytest.importorskip("reportlab")

from fairino.report import build_story, get_report_stylesheet, render_report  # noqa: E402


INST = Instance.from_values([[2, 2, 1], [2, 2, 1]], frozen={0: 0})
ALLOCATION = PartialAllocation.from_bundles([{0}, {1, 2}])


def test_report_stylesheet():
    """Test the styles and aliases of the report stylesheet."""
    styles = get_report_stylesheet(font_size=12)
    assert styles["normal"].fontSize == 12
    assert styles["normal"].leading == 18
    assert styles["h1"] is styles["heading1"]
    assert styles["h2"].fontSize == 13
    assert styles["holds"].textColor != styles["fails"].textColor


def test_build_story():
    """Test that every violation gets a paragraph."""
    reports = {"ef1": check_ef1(INST, ALLOCATION), "prop": check_prop(INST, ALLOCATION)}
    story = build_story(INST, ALLOCATION, reports)
    texts = [flowable.text for flowable in story if hasattr(flowable, "text")]
    assert "ef1: holds" in texts
    assert "prop: fails" in texts
    assert reports["prop"].violations[0].explanation in texts


def test_render_report(tmp_path):
    """Test that a PDF file is written."""
    path = render_report(INST, ALLOCATION, {"ef1": check_ef1(INST, ALLOCATION)}, tmp_path / "certificate.pdf")
    assert path.read_bytes().startswith(b"%PDF")


def test_report_command(capsys, tmp_path):
    """Test the report subcommand."""
    instance = tmp_path / "instance.json"
    instance.write_text(serialize_instance(INST), encoding="utf-8")
    allocation = tmp_path / "allocation.json"
    allocation.write_text(json.dumps({"bundles": [["g0"], ["g1", "g2"]]}), encoding="utf-8")
    output = tmp_path / "report.pdf"
    argv = ["report", "--instance", str(instance), "--allocation", str(allocation), "--property", "mms"]
    assert run_command([*argv, "-o", str(output)]) == 0
    assert capsys.readouterr().out.strip() == str(output)
    assert output.read_bytes().startswith(b"%PDF")
