"""Module for the exhaustive oracle: completion enumeration, Pareto frontiers and Nash welfare."""

import itertools
import logging
import math
from fractions import Fraction
from functools import lru_cache
from typing import FrozenSet, Iterator, List, Optional, Sequence, Set, Tuple

from .checkers import check_po_binary, check_sequencible, parse_property, property_label, run_picking_sequence
from .mms import mms_values
from .model import Instance
from .type_definitions import BudgetExceededError, Budgets, PartialAllocation, SolveOutcome
from .utils import at_least_fraction


logger = logging.getLogger(__name__)

Utilities = Tuple[int, ...]
MnwKey = Tuple[int, int]


def completion_count(inst: Instance) -> int:
    """The number of completions of the frozen allocation, ``n ** |U|``."""
    return inst.n_agents ** len(inst.unallocated())


def _assignments(inst: Instance, budget: int) -> Iterator[Tuple[int, ...]]:
    count = completion_count(inst)
    if count > budget:
        logger.warning("Refusing to enumerate %s completions (budget %s)", count, budget)
        raise BudgetExceededError(f"{count} completions exceed the enumeration budget of {budget}.")
    return itertools.product(inst.agents, repeat=len(inst.unallocated()))


def _allocation(inst: Instance, assignment: Sequence[int], *, frozen: bool = True) -> PartialAllocation:
    bundles = [set(bundle) for bundle in inst.frozen_allocation().bundles] if frozen else [set() for _ in inst.agents]
    for good, agent in zip(inst.unallocated(), assignment):
        bundles[agent].add(good)
    return PartialAllocation.from_bundles(bundles)


def enumerate_completions(inst: Instance, budgets: Budgets = Budgets()) -> Iterator[PartialAllocation]:
    """Every completion: every assignment of the unallocated goods to the agents, each exactly once.

    The unallocated goods are assigned in index order and the first good varies slowest, so the order is the
    lexicographic order of the assignment vectors.

    :param inst: The instance.
    :param budgets: ``budgets.enumeration`` bounds the number of completions.
    :return: Iterator of completions; merge them with :func:`fairino.model.complete_with`.
    :raises BudgetExceededError: If there are more completions than the budget allows.
    """
    for assignment in _assignments(inst, budgets.enumeration):
        yield _allocation(inst, assignment, frozen=False)


def _complete_allocations(inst: Instance, budgets: Budgets) -> Iterator[PartialAllocation]:
    for assignment in _assignments(inst, budgets.enumeration):
        yield _allocation(inst, assignment)


def _dominates(first: Utilities, second: Utilities) -> bool:
    return first != second and all(a >= b for a, b in zip(first, second))


@lru_cache(maxsize=64)
def _pareto_frontier(n_agents: int, values: Tuple[Tuple[int, ...], ...]) -> Tuple[Utilities, ...]:
    frontier: Set[Utilities] = {(0,) * n_agents}
    for good in range(len(values[0]) if values else 0):
        grown = set()
        for utilities in frontier:
            for agent in range(n_agents):
                row = list(utilities)
                row[agent] += values[agent][good]
                grown.add(tuple(row))
        ranked = sorted(grown, key=lambda u: (-sum(u), u))
        kept: List[Utilities] = []
        for candidate in ranked:
            if not any(_dominates(other, candidate) for other in kept):
                kept.append(candidate)
        frontier = set(kept)
    return tuple(sorted(frontier))


def pareto_frontier(inst: Instance, budgets: Budgets = Budgets()) -> Tuple[Utilities, ...]:
    """The Pareto optimal utility vectors over all complete allocations of the goods.

    :param inst: The instance; the frozen map plays no role.
    :param budgets: ``budgets.pareto`` bounds the number of allocations, ``n ** m``.
    :return: The frontier, sorted.
    :raises BudgetExceededError: If ``n ** m`` exceeds the budget.
    """
    count = inst.n_agents**inst.m
    if count > budgets.pareto:
        logger.warning("Refusing to explore %s allocations for Pareto optimality (budget %s)", count, budgets.pareto)
        raise BudgetExceededError(f"{count} allocations exceed the Pareto budget of {budgets.pareto}.")
    return _pareto_frontier(inst.n_agents, inst.values)


def utilities(inst: Instance, allocation: PartialAllocation) -> Utilities:
    """The utility vector of an allocation."""
    return tuple(inst.value_of(i, allocation.bundles[i]) for i in inst.agents)


def pareto_improvement(
    inst: Instance, allocation: PartialAllocation, budgets: Budgets = Budgets()
) -> Optional[Utilities]:
    """A utility vector of some allocation that Pareto dominates the given one.

    :param inst: The instance.
    :param allocation: A complete allocation.
    :param budgets: Limits of the exhaustive searches.
    :return: The first dominating frontier vector, or None if the allocation is Pareto optimal.
    :raises BudgetExceededError: If the search is beyond the budget.
    """
    current = utilities(inst, allocation)
    return next((u for u in pareto_frontier(inst, budgets) if _dominates(u, current)), None)


def oracle_po_check(inst: Instance, allocation: PartialAllocation, budgets: Budgets = Budgets()) -> bool:
    """Pareto optimality by exhaustive search, whatever the valuation class."""
    return pareto_improvement(inst, allocation, budgets) is None


def mnw_key(inst: Instance, allocation: PartialAllocation) -> MnwKey:
    """Nash welfare key: the number of agents with positive utility, then the product of those utilities."""
    positive = [u for u in utilities(inst, allocation) if u > 0]
    return len(positive), math.prod(positive)


def mnw_optimum(inst: Instance, budgets: Budgets = Budgets()) -> MnwKey:
    """The largest Nash welfare key over all completions.

    :raises BudgetExceededError: If there are more completions than the budget allows.
    """
    return max(mnw_key(inst, allocation) for allocation in _complete_allocations(inst, budgets))


def mnw_completions(inst: Instance, budgets: Budgets = Budgets()) -> List[PartialAllocation]:
    """The complete allocations maximizing Nash welfare among all completions, in enumeration order."""
    scored = [(mnw_key(inst, allocation), allocation) for allocation in _complete_allocations(inst, budgets)]
    best = max(key for key, _ in scored)
    return [allocation for key, allocation in scored if key == best]


def sequencible_by_enumeration(inst: Instance, allocation: PartialAllocation) -> bool:
    """Whether some picking sequence over the allocated goods realizes the allocation, trying all of them."""
    goods = allocation.allocated
    for sequence in itertools.product(inst.agents, repeat=len(goods)):
        picks = run_picking_sequence(inst, sequence, goods)
        if all(good in allocation.bundles[agent] for agent, good in picks):
            return True
    return False


class _Scorer:
    """Per-candidate checks on a value matrix updated from the frozen allocation.

    ``values[i][j]`` is ``v_i`` of bundle ``j``, ``best[i][j]`` the most ``i`` values a single good of bundle ``j``.
    """

    def __init__(self, inst: Instance, wanted: Sequence[str], budgets: Budgets):
        self.inst = inst
        self.budgets = budgets
        self.unallocated = inst.unallocated()
        frozen = inst.frozen_allocation()
        self.base = [[inst.value_of(i, bundle) for bundle in frozen.bundles] for i in inst.agents]
        self.base_best = [
            [max((inst.item_value(i, good) for good in bundle), default=0) for bundle in frozen.bundles]
            for i in inst.agents
        ]
        self.totals = [inst.total_value(i) for i in inst.agents]
        self.checks: List[Tuple[str, Fraction]] = [parse_property(label) for label in wanted]
        names = {name for name, _ in self.checks}
        self.mu: Optional[Tuple[int, ...]] = mms_values(inst, budgets).mu if names & {"mms", "alpha_mms"} else None
        self.mnw: Optional[MnwKey] = mnw_optimum(inst, budgets) if "mnw" in names else None
        self.frontier: Optional[Tuple[Utilities, ...]] = None
        if "po" in names and inst.valuation_class == "additive":
            self.frontier = pareto_frontier(inst, budgets)
        self.stuck = self._frozen_envy() if names & {"ef", "ef1"} else frozenset()

    def _frozen_envy(self) -> FrozenSet[Tuple[str, int, int]]:
        pairs = set()
        for i in self.inst.agents:
            for j in self.inst.agents:
                if i != j and self.base[i][i] < self.base[i][j]:
                    pairs.add(("ef", i, j))
                if i != j and self.base[i][i] < self.base[i][j] - self.base_best[i][j]:
                    pairs.add(("ef1", i, j))
        return frozenset(pairs)

    def _matrices(self, assignment: Sequence[int]) -> Tuple[List[List[int]], List[List[int]]]:
        values = [list(row) for row in self.base]
        best = [list(row) for row in self.base_best]
        for good, recipient in zip(self.unallocated, assignment):
            for i in self.inst.agents:
                worth = self.inst.item_value(i, good)
                values[i][recipient] += worth
                if worth > best[i][recipient]:
                    best[i][recipient] = worth
        return values, best

    def accepts(self, assignment: Sequence[int]) -> bool:
        touched = set(assignment)
        for name, i, j in self.stuck:
            if any(check == name for check, _ in self.checks) and i not in touched and j not in touched:
                return False
        values, best = self._matrices(assignment)
        n = self.inst.n_agents
        agents = self.inst.agents
        for name, factor in self.checks:
            if name == "ef" and any(values[i][i] < values[i][j] for i in agents for j in agents):
                return False
            if name == "ef1" and any(values[i][i] < values[i][j] - best[i][j] for i in agents for j in agents):
                return False
            if name == "prop" and any(n * values[i][i] < self.totals[i] for i in agents):
                return False
            if name == "prop1":
                for i in agents:
                    elsewhere = max((best[i][j] for j in agents if j != i), default=0)
                    if n * (values[i][i] + elsewhere) < self.totals[i]:
                        return False
            if name in ("mms", "alpha_mms") and self.mu is not None:
                if any(not at_least_fraction(values[i][i], factor, self.mu[i]) for i in agents):
                    return False
            if name == "mnw" and self.mnw is not None:
                positive = [values[i][i] for i in agents if values[i][i] > 0]
                if (len(positive), math.prod(positive)) != self.mnw:
                    return False
            if name == "po" and not self._pareto_optimal(assignment, values):
                return False
            if name == "sequencible" and not check_sequencible(self.inst, _allocation(self.inst, assignment))[0]:
                return False
        return True

    def _pareto_optimal(self, assignment: Sequence[int], values: List[List[int]]) -> bool:
        if self.inst.valuation_class == "binary":
            return check_po_binary(self.inst, _allocation(self.inst, assignment)).holds
        if self.inst.valuation_class == "lexicographic":
            return check_sequencible(self.inst, _allocation(self.inst, assignment))[0]
        current = tuple(values[i][i] for i in self.inst.agents)
        return not any(_dominates(u, current) for u in self.frontier or ())


def oracle_solve(inst: Instance, properties: Sequence[str], *, budgets: Budgets = Budgets()) -> SolveOutcome:
    """Find the first completion, in enumeration order, satisfying every requested property.

    :param inst: The instance.
    :param properties: Property labels accepted by :func:`fairino.checkers.parse_property`; ``mnw`` asks for a
        completion maximizing Nash welfare among all completions.
    :param budgets: Limits of the exhaustive searches.
    :return: SolveOutcome; ``not_applicable`` when a search is beyond its budget.
    """
    wanted = list(properties) or ["po"]
    labels = ", ".join(property_label(*parse_property(label)) for label in wanted)
    try:
        scorer = _Scorer(inst, wanted, budgets)
        for assignment in _assignments(inst, budgets.enumeration):
            if scorer.accepts(assignment):
                logger.debug("Oracle found a completion with %s", labels)
                return SolveOutcome.found(_allocation(inst, assignment), f"exhaustive search for {labels}")
    except BudgetExceededError as exc:
        return SolveOutcome.not_applicable(str(exc))
    return SolveOutcome.none_exists(f"no completion satisfies {labels}")
