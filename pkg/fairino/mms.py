"""Module for maximin share values under a frozen allocation."""

import itertools
import logging
from typing import List, Optional, Set

from .model import Instance
from .type_definitions import BudgetExceededError, Budgets, MmsResult, MmsValue, PartialAllocation, WrongClassError


logger = logging.getLogger(__name__)


def _require_class(inst: Instance, expected: str) -> None:
    if inst.valuation_class != expected:
        raise WrongClassError(f"Expected a {expected} instance, got {inst.valuation_class}.")


def _result(inst: Instance, agent: int, bundles: List[Set[int]]) -> MmsValue:
    partition = PartialAllocation.from_bundles(bundles)
    return MmsValue(min(inst.value_of(agent, bundle) for bundle in partition.bundles), partition)


def mms_value_binary(inst: Instance, agent: int) -> MmsValue:
    """Maximin share of an agent with binary valuations.

    Each approved unallocated good, in index order, goes to the lowest indexed bundle of minimum value; goods the
    agent does not approve go to the first bundle.

    :param inst: A binary instance.
    :param agent: Index of the agent.
    :return: MmsValue with the maximin share and a partition attaining it.
    :raises WrongClassError: If the instance is not binary.
    """
    _require_class(inst, "binary")
    bundles = [set(bundle) for bundle in inst.frozen_allocation().bundles]
    values = [inst.value_of(agent, bundle) for bundle in bundles]
    for good in inst.unallocated():
        if inst.item_value(agent, good):
            target = min(range(inst.n_agents), key=lambda j: (values[j], j))
            values[target] += 1
        else:
            target = 0
        bundles[target].add(good)
    result = _result(inst, agent, bundles)
    logger.debug("Binary maximin share of agent %s: %s", agent, result.mu)
    return result


def mms_value_lex(inst: Instance, agent: int) -> MmsValue:
    """Maximin share of an agent with lexicographic valuations.

    The frozen bundles still in play are sorted by value (then index) at every step. If every other bundle in play is
    worth at least the best unallocated good, the weakest bundle takes all unallocated goods; otherwise it takes the
    best unallocated good and leaves play.

    :param inst: A lexicographic instance.
    :param agent: Index of the agent.
    :return: MmsValue with the maximin share and a partition attaining it.
    :raises WrongClassError: If the instance is not lexicographic.
    """
    _require_class(inst, "lexicographic")
    bundles = [set(bundle) for bundle in inst.frozen_allocation().bundles]
    remaining = inst.order_by_value(agent, inst.unallocated())
    active = list(inst.agents)
    while remaining:
        active.sort(key=lambda j: (inst.value_of(agent, bundles[j]), j))
        weakest, top = active[0], remaining[0]
        if all(inst.value_of(agent, bundles[j]) >= inst.item_value(agent, top) for j in active[1:]):
            bundles[weakest].update(remaining)
            break
        bundles[weakest].add(top)
        remaining.pop(0)
        active.pop(0)
    result = _result(inst, agent, bundles)
    logger.debug("Lexicographic maximin share of agent %s: %s", agent, result.mu)
    return result


def mms_value_bruteforce(inst: Instance, agent: int, budgets: Budgets = Budgets()) -> MmsValue:
    """Maximin share of an agent by enumerating every completion.

    :param inst: Any instance.
    :param agent: Index of the agent.
    :param budgets: Limits of the exhaustive searches; ``budgets.mms`` bounds the number of completions.
    :return: MmsValue with the maximin share and the first partition (in enumeration order) attaining it.
    :raises BudgetExceededError: If there are more completions than the budget allows.
    """
    unallocated = inst.unallocated()
    count = inst.n_agents ** len(unallocated)
    if count > budgets.mms:
        logger.warning("Refusing to enumerate %s completions (budget %s)", count, budgets.mms)
        raise BudgetExceededError(f"{count} completions exceed the maximin share budget of {budgets.mms}.")
    frozen = inst.frozen_allocation()
    base = [inst.value_of(agent, bundle) for bundle in frozen.bundles]
    item = [inst.item_value(agent, good) for good in unallocated]
    best: Optional[int] = None
    best_assignment: tuple = ()
    for assignment in itertools.product(range(inst.n_agents), repeat=len(unallocated)):
        values = list(base)
        for position, recipient in enumerate(assignment):
            values[recipient] += item[position]
        worst = min(values)
        if best is None or worst > best:
            best, best_assignment = worst, assignment
    bundles = [set(bundle) for bundle in frozen.bundles]
    for good, recipient in zip(unallocated, best_assignment):
        bundles[recipient].add(good)
    return _result(inst, agent, bundles)


def mms_value(inst: Instance, agent: int, budgets: Budgets = Budgets()) -> MmsValue:
    """Maximin share of an agent with the best method for the valuation class."""
    if inst.valuation_class == "binary":
        return mms_value_binary(inst, agent)
    if inst.valuation_class == "lexicographic":
        return mms_value_lex(inst, agent)
    return mms_value_bruteforce(inst, agent, budgets)


def mms_values(inst: Instance, budgets: Budgets = Budgets(), *, bruteforce: bool = False) -> MmsResult:
    """Maximin shares of all agents.

    :param inst: The instance.
    :param budgets: Limits of the exhaustive searches.
    :param bruteforce: Enumerate completions even when a polynomial method exists.
    :return: MmsResult with one share and one partition per agent.
    """
    method = mms_value_bruteforce if bruteforce else mms_value
    values = [method(inst, i, budgets) for i in inst.agents]
    return MmsResult(tuple(value.mu for value in values), tuple(value.witness for value in values))
