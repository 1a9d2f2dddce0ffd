"""Test the fairino.type_definitions module."""

import pytest

from fairino.type_definitions import (
    Budgets,
    FairnessReport,
    InstanceError,
    Mismatch,
    PartialAllocation,
    SolveOutcome,
    Violation,
)


def test_budgets_defaults():
    """Test the default limits of the exhaustive searches."""
    assert Budgets() == Budgets(10**7, 10**7, 10**7)
    assert Budgets.uniform(5) == Budgets(5, 5, 5)


@pytest.mark.parametrize("invalid_budget", [0, -3])
def test_budgets_uniform_invalid(invalid_budget):
    """Test that a budget must be positive."""
    with pytest.raises(ValueError) as exc_info:
        Budgets.uniform(invalid_budget)
    assert str(exc_info.value) == f"Invalid budget: {invalid_budget}"


def test_partial_allocation_helpers():
    """Test the PartialAllocation helpers."""
    allocation = PartialAllocation.from_assignment(3, {0: 2, 1: 0, 3: 2})
    assert allocation.bundles == (frozenset({1}), frozenset(), frozenset({0, 3}))
    assert allocation.n_agents == 3
    assert allocation.allocated == frozenset({0, 1, 3})
    assert not allocation.is_complete(4)
    assert allocation.owner_of(3) == 2
    assert allocation.owner_of(2) is None
    assert allocation.assignment() == {0: 2, 1: 0, 3: 2}
    grown = allocation.with_good(1, 2)
    assert grown.is_complete(4)
    assert grown.sorted_bundles() == [[1], [2], [0, 3]]
    assert PartialAllocation.empty(2).bundles == (frozenset(), frozenset())


def test_partial_allocation_rejects_shared_goods():
    """Test that two bundles cannot share a good."""
    with pytest.raises(InstanceError):
        PartialAllocation.from_bundles([{0, 1}, {1}])


def test_fairness_report_sorts_violations():
    """Test that reports sort their violations and derive `holds`."""
    report = FairnessReport.from_violations(
        "ef", [Violation(1, 0, "b"), Violation(0, None, "c"), Violation(0, 2, "a")]
    )
    assert not report.holds
    assert [(v.agent, v.counterpart) for v in report.violations] == [(0, None), (0, 2), (1, 0)]
    assert report.to_dict()["violations"][1] == {"agent": 0, "counterpart": 2, "explanation": "a"}
    assert FairnessReport.from_violations("ef", []) == FairnessReport("ef", True, ())


def test_solve_outcome_constructors():
    """Test the SolveOutcome alternative constructors."""
    witness = PartialAllocation.from_bundles([{0}])
    assert SolveOutcome.found(witness, "x") == SolveOutcome("witness", witness, "x")
    assert SolveOutcome.none_exists("y").witness is None
    assert SolveOutcome.not_applicable("z").status == "not_applicable"


def test_mismatch_to_dict():
    """Test the JSON representation of a sweep mismatch."""
    mismatch = Mismatch(3, {"agents": 1}, "witness", "none_exists")
    assert mismatch.to_dict() == {
        "case": 3,
        "instance": {"agents": 1},
        "solver": "witness",
        "oracle": "none_exists",
        "note": "",
    }
