"""Test the fairino.oracle module."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairino.checkers import check_property
from fairino.model import Instance, complete_with
from fairino.oracle import (
    completion_count,
    enumerate_completions,
    mnw_completions,
    mnw_key,
    mnw_optimum,
    oracle_po_check,
    oracle_solve,
    pareto_frontier,
    pareto_improvement,
    utilities,
)
from fairino.reductions import gen_counterexample
from fairino.type_definitions import BudgetExceededError, Budgets, PartialAllocation

from .strategies import additive_instances, binary_instances


CROSSED = Instance.from_values([[2, 1], [1, 2]])


def test_enumerate_completions_order():
    """Test that completions cover the unallocated goods in lexicographic assignment order."""
    inst = Instance.from_values([[1, 1, 1], [1, 1, 1]], frozen={1: 1})
    completions = [completion.sorted_bundles() for completion in enumerate_completions(inst)]
    assert completion_count(inst) == 4
    assert completions == [[[0, 2], []], [[0], [2]], [[2], [0]], [[], [0, 2]]]


def test_enumerate_completions_without_unallocated_goods():
    """Test that a fully frozen instance has exactly one empty completion."""
    inst = Instance.from_values([[1], [1]], frozen={0: 1})
    completions = list(enumerate_completions(inst))
    assert completions == [PartialAllocation.empty(2)]
    assert complete_with(inst, completions[0]).bundles == (frozenset(), frozenset({0}))


def test_enumeration_budget():
    """Test that enumeration beyond the budget raises BudgetExceededError."""
    with pytest.raises(BudgetExceededError):
        list(enumerate_completions(CROSSED, Budgets.uniform(3)))


def test_pareto_frontier():
    """Test the Pareto optimal utility vectors."""
    assert pareto_frontier(CROSSED) == ((0, 3), (2, 2), (3, 0))
    assert pareto_frontier(Instance.from_values([[1, 0], [0, 1]])) == ((1, 1),)
    with pytest.raises(BudgetExceededError):
        pareto_frontier(CROSSED, Budgets(pareto=3))


def test_pareto_improvement():
    """Test finding a dominating utility vector."""
    swapped = PartialAllocation.from_bundles([{1}, {0}])
    assert utilities(CROSSED, swapped) == (1, 1)
    assert pareto_improvement(CROSSED, swapped) == (2, 2)
    assert not oracle_po_check(CROSSED, swapped)
    assert oracle_po_check(CROSSED, PartialAllocation.from_bundles([{0}, {1}]))


def test_mnw():
    """Test Nash welfare keys and their optimum over completions."""
    inst = gen_counterexample("mnw_not_ef1")
    assert mnw_optimum(inst) == (3, 16)
    optima = mnw_completions(inst)
    assert [a.sorted_bundles() for a in optima] == [[[0, 1], [2, 3], [4, 5, 6, 7]]]
    assert mnw_key(inst, optima[0]) == (3, 16)
    assert mnw_key(CROSSED, PartialAllocation.from_bundles([{0, 1}, set()])) == (1, 3)


@pytest.mark.parametrize(
    "properties, status, bundles",
    [
        (["mnw"], "witness", [[0, 1], [2, 3], [4, 5, 6, 7]]),
        (["mnw", "ef1"], "none_exists", None),
        (["ef1", "po"], "witness", [[0], [1, 2, 3], [4, 5, 6, 7]]),
        ([], "witness", [[0, 1], [2, 3], [4, 5, 6, 7]]),
    ],
)
def test_oracle_solve_on_nash_welfare_family(properties, status, bundles):
    """Test that every Nash welfare optimum fails EF1 while an EF1 and PO completion exists."""
    outcome = oracle_solve(gen_counterexample("mnw_not_ef1"), properties)
    assert outcome.status == status
    if bundles is not None:
        assert outcome.witness.sorted_bundles() == bundles


def test_oracle_solve_budget():
    """Test that a search beyond the budget is not applicable."""
    outcome = oracle_solve(CROSSED, ["ef1"], budgets=Budgets.uniform(2))
    assert outcome.status == "not_applicable"


def test_oracle_solve_sequencible():
    """Test the first sequencible completion of a lexicographic instance."""
    inst = Instance.from_rankings([[0, 1], [1, 0]])
    outcome = oracle_solve(inst, ["sequencible"])
    assert outcome.witness.sorted_bundles() == [[0, 1], []]


@settings(max_examples=60, deadline=None)
@given(
    st.one_of(additive_instances(max_goods=4), binary_instances(max_goods=4)),
    st.sampled_from(["ef", "ef1", "prop", "prop1", "mms", "alpha_mms:2/3", "po", "mnw"]),
)
def test_oracle_agrees_with_checkers(inst, prop):
    """Test the oracle against checking every completion one by one."""
    outcome = oracle_solve(inst, [prop])
    found = [
        allocation
        for allocation in (complete_with(inst, completion) for completion in enumerate_completions(inst))
        if check_property(inst, allocation, prop).holds
    ]
    if found:
        assert outcome.status == "witness"
        assert outcome.witness == found[0]
    else:
        assert outcome.status == "none_exists"
