"""Test the fairino.checkers module."""

from fractions import Fraction

import pytest
from hypothesis import given, settings

from fairino.checkers import (
    build_envy_graph,
    check_alpha_mms,
    check_ef,
    check_ef1,
    check_po,
    check_po_binary,
    check_prop,
    check_prop1,
    check_property,
    check_sequencible,
    parse_property,
    picking_sequence,
    property_label,
    reports_to_dict,
    run_picking_sequence,
)
from fairino.model import Instance
from fairino.oracle import sequencible_by_enumeration
from fairino.type_definitions import AllocationError, PartialAllocation, WrongClassError

from .strategies import additive_instances, completed, lex_instances


IDENTICAL = Instance.from_values([[2, 2, 1], [2, 2, 1]])
LEX = Instance.from_rankings([[0, 1, 2], [0, 2, 1]])


def allocation(*bundles):
    return PartialAllocation.from_bundles(bundles)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("ef1", ("ef1", Fraction(1))),
        ("EF1", ("ef1", Fraction(1))),
        ("alpha_mms:3/4", ("alpha_mms", Fraction(3, 4))),
        ("alpha-mms:1/2", ("alpha_mms", Fraction(1, 2))),
        ("po", ("po", Fraction(1))),
    ],
)
def test_parse_property(text, expected):
    """Test parsing property names."""
    assert parse_property(text) == expected


@pytest.mark.parametrize("text", ["foo", "alpha_mms", "ef1:1/2", "alpha_mms:2"])
def test_parse_property_errors(text):
    """Test that unknown properties and misplaced factors raise ValueError."""
    with pytest.raises(ValueError):
        parse_property(text)


@pytest.mark.parametrize(
    "name, alpha, expected",
    [
        ("mms", Fraction(1), "mms"),
        ("alpha_mms", Fraction(1), "mms"),
        ("mms", Fraction(3, 4), "alpha_mms:3/4"),
        ("ef1", Fraction(1), "ef1"),
    ],
)
def test_property_label(name, alpha, expected):
    """Test the canonical property labels."""
    assert property_label(name, alpha) == expected


@pytest.mark.parametrize(
    "bundles, ef, ef1, prop, prop1",
    [
        ([{0}, {1, 2}], False, True, False, True),
        ([{0, 2}, {1}], False, True, False, True),
        ([set(), {0, 1, 2}], False, False, False, False),
    ],
)
def test_fairness_predicates(bundles, ef, ef1, prop, prop1):
    """Test EF, EF1, PROP and PROP1 on two identical agents valuing the goods 2, 2, 1."""
    a = allocation(*bundles)
    assert check_ef(IDENTICAL, a).holds is ef
    assert check_ef1(IDENTICAL, a).holds is ef1
    assert check_prop(IDENTICAL, a).holds is prop
    assert check_prop1(IDENTICAL, a).holds is prop1


def test_ef_violation_names_the_pair():
    """Test that an envy violation names the envious agent and the envied one."""
    report = check_ef(IDENTICAL, allocation({0}, {1, 2}))
    assert [(v.agent, v.counterpart) for v in report.violations] == [(0, 1)]
    assert report.violations[0].explanation == "agent 0 values its bundle at 2 and bundle 1 at 3"


@pytest.mark.parametrize("checker", [check_ef, check_ef1, check_prop, check_prop1])
def test_checkers_require_complete_allocations(checker):
    """Test that the checkers reject incomplete allocations."""
    with pytest.raises(AllocationError) as exc_info:
        checker(IDENTICAL, allocation({0}, {1}))
    assert str(exc_info.value) == "The allocation is not complete; unallocated goods: [2]."


def test_partial_checks():
    """Test EF1 and PROP1 on partial allocations."""
    partial = allocation(set(), {0, 1})
    assert not check_ef1(IDENTICAL, partial, complete=False).holds
    assert check_ef1(IDENTICAL, allocation(set(), {0}), complete=False).holds
    assert check_prop1(IDENTICAL, allocation(set(), {0}), complete=False).holds


@pytest.mark.parametrize(
    "bundles, holds",
    [
        ([{0}, {1}], True),
        ([set(), {0, 1}], True),
        ([{1}, {0}], False),
        ([{0, 1}, set()], False),
    ],
)
def test_check_po_binary(bundles, holds):
    """Test that binary PO needs every approved good with an approver."""
    inst = Instance.from_values([[1, 0], [1, 1]], valuation_class="binary")
    assert check_po_binary(inst, allocation(*bundles)).holds is holds


def test_check_po_binary_wrong_class():
    """Test that check_po_binary rejects non-binary instances."""
    with pytest.raises(WrongClassError):
        check_po_binary(IDENTICAL, allocation({0}, {1, 2}))


def test_run_picking_sequence():
    """Test that agents pick their favorite remaining good in turn."""
    assert run_picking_sequence(LEX, [1, 0, 0], range(3)) == [(1, 0), (0, 1), (0, 2)]
    assert run_picking_sequence(LEX, [1, 0, 0, 1], [2]) == [(1, 2)]


@pytest.mark.parametrize(
    "bundles, expected",
    [
        ([{0, 1}, {2}], (0, 0, 1)),
        ([{1}, {0, 2}], (1, 0, 1)),
        ([{2}, {0, 1}], None),
        ([set(), set()], ()),
    ],
)
def test_picking_sequence(bundles, expected):
    """Test the peeling construction of picking sequences."""
    a = allocation(*bundles)
    assert picking_sequence(LEX, a) == expected
    assert check_sequencible(LEX, a) == (expected is not None, expected)


def test_picking_sequence_needs_strict_orders():
    """Test that ties among allocated goods raise WrongClassError."""
    with pytest.raises(WrongClassError):
        picking_sequence(IDENTICAL, allocation({0}, {1}))


@settings(max_examples=150, deadline=None)
@given(completed(lex_instances(max_agents=3, max_goods=4)))
def test_sequencible_matches_enumeration(case):
    """Test that peeling agrees with trying every picking sequence."""
    inst, bundles = case
    a = PartialAllocation.from_bundles(bundles)
    assert check_sequencible(inst, a)[0] is sequencible_by_enumeration(inst, a)


def test_build_envy_graph():
    """Test envy graphs, their acyclicity and topological order."""
    graph = build_envy_graph(IDENTICAL, allocation({0}, {1, 2}))
    assert graph.edges == ((0, 1),)
    assert graph.acyclic
    assert graph.order == (0, 1)
    swapped = Instance.from_values([[0, 1], [1, 0]])
    cyclic = build_envy_graph(swapped, allocation({0}, {1}))
    assert cyclic.edges == ((0, 1), (1, 0))
    assert not cyclic.acyclic
    assert cyclic.order is None


def test_check_alpha_mms():
    """Test the alpha-MMS check with given shares."""
    a = allocation({0}, {1, 2})
    assert check_alpha_mms(IDENTICAL, a, Fraction(1), (2, 2)).holds
    report = check_alpha_mms(IDENTICAL, a, Fraction(3, 4), (3, 3))
    assert report.property == "alpha_mms:3/4"
    assert [v.agent for v in report.violations] == [0]
    with pytest.raises(ValueError):
        check_alpha_mms(IDENTICAL, a, Fraction(1), (2,))


@pytest.mark.parametrize(
    "inst, bundles, holds",
    [
        (IDENTICAL, [{0}, {1, 2}], True),
        (Instance.from_values([[1, 0], [0, 1]]), [{1}, {0}], False),
        (Instance.from_values([[1, 0], [0, 1]]), [{0}, {1}], True),
        (LEX, [{2}, {0, 1}], False),
        (LEX, [{0, 1}, {2}], True),
    ],
)
def test_check_po(inst, bundles, holds):
    """Test Pareto optimality across valuation classes."""
    assert check_po(inst, allocation(*bundles)).holds is holds


def test_check_property_dispatch():
    """Test the single entry point of the checkers."""
    a = allocation({0}, {1, 2})
    assert check_property(IDENTICAL, a, "ef1").holds
    assert not check_property(IDENTICAL, a, "prop").holds
    assert check_property(IDENTICAL, a, "mms").holds
    assert check_property(IDENTICAL, a, "alpha_mms", alpha=Fraction(1, 2)).property == "alpha_mms:1/2"
    assert not check_property(IDENTICAL, a, "mms", mu=(3, 3)).holds
    assert check_property(IDENTICAL, a, "po").holds
    assert check_property(IDENTICAL, a, "mnw").holds
    assert reports_to_dict({"ef1": check_ef1(IDENTICAL, a)}) == {
        "ef1": {"property": "ef1", "holds": True, "violations": []}
    }


@settings(max_examples=200, deadline=None)
@given(completed(additive_instances()))
def test_ef1_implies_prop1(case):
    """Test that every EF1 allocation is PROP1 and every EF allocation is PROP."""
    inst, bundles = case
    a = PartialAllocation.from_bundles(bundles)
    if check_ef1(inst, a).holds:
        assert check_prop1(inst, a).holds
    if check_ef(inst, a).holds:
        assert check_prop(inst, a).holds
