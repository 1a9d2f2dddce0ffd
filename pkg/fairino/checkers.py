"""Module for exact fairness and efficiency predicates on (partial) allocations."""

import logging
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from .model import Instance
from .type_definitions import (
    AllocationError,
    Budgets,
    EnvyGraph,
    FairnessReport,
    PartialAllocation,
    Violation,
    WrongClassError,
)
from .utils import at_least_fraction, parse_alpha


logger = logging.getLogger(__name__)

PROPERTIES = ("ef", "ef1", "prop", "prop1", "mms", "alpha_mms", "po", "mnw", "sequencible")


def parse_property(text: str) -> Tuple[str, Fraction]:
    """Parse a property name, with the approximation factor of ``alpha_mms:p/q``.

    :param text: ``ef``, ``ef1``, ``prop``, ``prop1``, ``mms``, ``alpha_mms:p/q``, ``po``, ``mnw`` or ``sequencible``.
    :return: The bare property name and its factor (1 unless given).
    :raises ValueError: If the property is unknown or the factor malformed.
    """
    name, _, factor = text.strip().partition(":")
    name = name.lower().replace("-", "_")
    if name not in PROPERTIES:
        raise ValueError(f"Unknown property: {text!r}. Use one of {', '.join(PROPERTIES)}.")
    if name == "alpha_mms":
        if not factor:
            raise ValueError("Property `alpha_mms` needs a factor, e.g. `alpha_mms:3/4`.")
        return name, parse_alpha(factor)
    if factor:
        raise ValueError(f"Property {name!r} takes no factor.")
    return name, Fraction(1)


def property_label(name: str, alpha: Fraction = Fraction(1)) -> str:
    """Canonical label of a property, ``alpha_mms:p/q`` for a factor below one."""
    if name in ("mms", "alpha_mms") and alpha != 1:
        return f"alpha_mms:{alpha}"
    return "mms" if name == "alpha_mms" else name


def require_complete(inst: Instance, allocation: PartialAllocation) -> None:
    """Check that an allocation has one bundle per agent and covers every good exactly once.

    :raises AllocationError: If the allocation is not complete.
    """
    if allocation.n_agents != inst.n_agents:
        raise AllocationError(f"Expected {inst.n_agents} bundles, got {allocation.n_agents}.")
    if not allocation.is_complete(inst.m):
        missing = sorted(set(range(inst.m)) - allocation.allocated)
        raise AllocationError(f"The allocation is not complete; unallocated goods: {missing}.")


def _max_value(inst: Instance, agent: int, bundle: Iterable[int]) -> int:
    return max((inst.item_value(agent, good) for good in bundle), default=0)


def check_ef(inst: Instance, allocation: PartialAllocation) -> FairnessReport:
    """Check envy-freeness: no agent values another bundle above its own.

    :param inst: The instance.
    :param allocation: A complete allocation.
    :return: FairnessReport for ``ef``.
    :raises AllocationError: If the allocation is incomplete.
    """
    require_complete(inst, allocation)
    violations = []
    for i in inst.agents:
        own = inst.value_of(i, allocation.bundles[i])
        for j in inst.agents:
            other = inst.value_of(i, allocation.bundles[j])
            if i != j and own < other:
                violations.append(Violation(i, j, f"agent {i} values its bundle at {own} and bundle {j} at {other}"))
    return FairnessReport.from_violations("ef", violations)


def check_ef1(inst: Instance, allocation: PartialAllocation, *, complete: bool = True) -> FairnessReport:
    """Check envy-freeness up to one good.

    For every pair ``i, j`` with a non-empty bundle ``A_j`` some good ``g`` in ``A_j`` must satisfy
    ``v_i(A_i) >= v_i(A_j - g)``; removing the good ``i`` values most is the best choice.

    :param inst: The instance.
    :param allocation: The allocation to check.
    :param complete: Require a complete allocation; pass False to check a partial allocation.
    :return: FairnessReport for ``ef1``.
    :raises AllocationError: If ``complete`` is set and the allocation is incomplete.
    """
    if complete:
        require_complete(inst, allocation)
    violations = []
    for i in inst.agents:
        own = inst.value_of(i, allocation.bundles[i])
        for j in inst.agents:
            bundle = allocation.bundles[j]
            if i == j or not bundle:
                continue
            reduced = inst.value_of(i, bundle) - _max_value(inst, i, bundle)
            if own < reduced:
                violations.append(
                    Violation(i, j, f"agent {i} values its bundle at {own} and bundle {j} less one good at {reduced}")
                )
    return FairnessReport.from_violations("ef1", violations)


def check_prop(inst: Instance, allocation: PartialAllocation) -> FairnessReport:
    """Check proportionality: ``n * v_i(A_i) >= v_i(M)`` for every agent.

    :raises AllocationError: If the allocation is incomplete.
    """
    require_complete(inst, allocation)
    violations = []
    for i in inst.agents:
        own, total = inst.value_of(i, allocation.bundles[i]), inst.total_value(i)
        if inst.n_agents * own < total:
            violations.append(Violation(i, None, f"agent {i} gets {own}, below {total}/{inst.n_agents}"))
    return FairnessReport.from_violations("prop", violations)


def _prop1_violations(inst: Instance, allocation: PartialAllocation, goods: Sequence[int]) -> List[Violation]:
    violations = []
    for i in inst.agents:
        bundle = allocation.bundles[i]
        own = inst.value_of(i, bundle)
        total = inst.value_of(i, goods)
        others = [good for good in goods if good not in bundle]
        best = _max_value(inst, i, others) if others else 0
        if inst.n_agents * (own + best) < total:
            violations.append(
                Violation(i, None, f"agent {i} gets {own} plus at most {best}, below {total}/{inst.n_agents}")
            )
    return violations


def check_prop1(inst: Instance, allocation: PartialAllocation, *, complete: bool = True) -> FairnessReport:
    """Check proportionality up to one good.

    Agent ``i`` is satisfied when ``n * (v_i(A_i) + v_i(g)) >= v_i(M)`` for some good ``g`` held by another agent, or
    when ``n * v_i(A_i) >= v_i(M)`` if the other bundles are empty. On partial allocations ``M`` is the set of
    allocated goods.

    :param inst: The instance.
    :param allocation: The allocation to check.
    :param complete: Require a complete allocation; pass False to check a partial allocation.
    :return: FairnessReport for ``prop1``.
    :raises AllocationError: If ``complete`` is set and the allocation is incomplete.
    """
    if complete:
        require_complete(inst, allocation)
    goods = sorted(allocation.allocated)
    return FairnessReport.from_violations("prop1", _prop1_violations(inst, allocation, goods))


def check_po_binary(inst: Instance, allocation: PartialAllocation) -> FairnessReport:
    """Check Pareto optimality under binary valuations on a (partial) allocation.

    Every allocated good approved by some agent must sit with an approver.

    :raises WrongClassError: If the instance is not binary.
    """
    if inst.valuation_class != "binary":
        raise WrongClassError(f"Expected a binary instance, got {inst.valuation_class}.")
    violations = []
    for owner, bundle in enumerate(allocation.bundles):
        for good in sorted(bundle):
            approvers = [i for i in inst.agents if inst.item_value(i, good)]
            if approvers and owner not in approvers:
                violations.append(
                    Violation(
                        owner, approvers[0], f"good {inst.goods[good]!r} is held by agent {owner}, a non-approver"
                    )
                )
    return FairnessReport.from_violations("po", violations)


def favorite(inst: Instance, agent: int, goods: Iterable[int]) -> Optional[int]:
    """The good an agent values most among ``goods``, lowest index on ties, or None if there is none."""
    row = inst.values[agent]
    return min(goods, key=lambda good: (-row[good], good), default=None)


def run_picking_sequence(inst: Instance, sequence: Sequence[int], goods: Iterable[int]) -> List[Tuple[int, int]]:
    """Let the agents of a picking sequence take their favorite remaining good in turn.

    :param inst: The instance.
    :param sequence: Agent indices, one per turn.
    :param goods: The goods on the table.
    :return: The ``(agent, good)`` picks in turn order; stops early when the goods run out.
    """
    remaining = set(goods)
    picks = []
    for agent in sequence:
        good = favorite(inst, agent, remaining)
        if good is None:
            break
        remaining.discard(good)
        picks.append((agent, good))
    return picks


def picking_sequence(inst: Instance, allocation: PartialAllocation) -> Optional[Tuple[int, ...]]:
    """Peel off agents holding their top remaining good until nothing is left.

    :param inst: The instance; every agent must value the allocated goods pairwise differently.
    :param allocation: A (partial) allocation.
    :return: A picking sequence realizing the allocation over its goods, or None if it is not sequencible.
    :raises WrongClassError: If some agent values two allocated goods equally.
    """
    remaining = set(allocation.allocated)
    for agent in inst.agents:
        if not inst.has_strict_values(agent, remaining):
            raise WrongClassError(f"Agent {agent} values two allocated goods equally; picking needs strict orders.")
    owner = allocation.assignment()
    sequence: List[int] = []
    while remaining:
        tops = {i: min(remaining, key=lambda good, row=inst.values[i]: (-row[good], good)) for i in inst.agents}
        picker = next((i for i in inst.agents if owner[tops[i]] == i), None)
        if picker is None:
            logger.debug("No agent holds its top remaining good among %s", sorted(remaining))
            return None
        sequence.append(picker)
        remaining.discard(tops[picker])
    return tuple(sequence)


def check_sequencible(inst: Instance, allocation: PartialAllocation) -> Tuple[bool, Optional[Tuple[int, ...]]]:
    """Check whether a (partial) allocation can be realized by a picking sequence over its goods.

    On lexicographic instances this is Pareto optimality of the allocation restricted to its goods.

    :param inst: The instance.
    :param allocation: A (partial) allocation.
    :return: Whether it is sequencible, and a realizing sequence when it is.
    :raises WrongClassError: If some agent values two allocated goods equally.
    """
    sequence = picking_sequence(inst, allocation)
    return sequence is not None, sequence


def build_envy_graph(inst: Instance, allocation: PartialAllocation) -> EnvyGraph:
    """Build the envy graph: an edge ``(i, j)`` when ``v_i(A_i) < v_i(A_j)``.

    :param inst: The instance.
    :param allocation: A (partial) allocation.
    :return: EnvyGraph with its acyclicity and, if acyclic, a topological order (lowest index first on ties).
    """
    graph = nx.DiGraph()
    graph.add_nodes_from(inst.agents)
    for i in inst.agents:
        own = inst.value_of(i, allocation.bundles[i])
        graph.add_edges_from(
            (i, j) for j in inst.agents if j != i and own < inst.value_of(i, allocation.bundles[j])
        )
    acyclic = nx.is_directed_acyclic_graph(graph)
    order = tuple(nx.lexicographical_topological_sort(graph)) if acyclic else None
    return EnvyGraph(inst.n_agents, tuple(sorted(graph.edges)), acyclic, order)


def check_alpha_mms(
    inst: Instance, allocation: PartialAllocation, alpha: Fraction, mu: Sequence[int]
) -> FairnessReport:
    """Check that every agent gets at least ``alpha`` times its maximin share.

    :param inst: The instance.
    :param allocation: A complete allocation.
    :param alpha: Approximation factor in ``(0, 1]``.
    :param mu: One maximin share per agent.
    :return: FairnessReport for ``mms`` (or ``alpha_mms:p/q``).
    :raises ValueError: If ``mu`` does not have one entry per agent.
    :raises AllocationError: If the allocation is incomplete.
    """
    if len(mu) != inst.n_agents:
        raise ValueError(f"Expected {inst.n_agents} maximin shares, got {len(mu)}.")
    require_complete(inst, allocation)
    violations = []
    for i in inst.agents:
        own = inst.value_of(i, allocation.bundles[i])
        if not at_least_fraction(own, alpha, mu[i]):
            violations.append(Violation(i, None, f"agent {i} gets {own}, below {alpha} x {mu[i]}"))
    return FairnessReport.from_violations(property_label("alpha_mms", alpha), violations)


def check_po(inst: Instance, allocation: PartialAllocation, budgets: Budgets = Budgets()) -> FairnessReport:
    """Check Pareto optimality with the characterization of the valuation class.

    Binary instances need every approved good with an approver, lexicographic instances need a sequencible
    allocation, and additive instances fall back to the exhaustive oracle.

    :raises BudgetExceededError: If the exhaustive check is beyond the budget.
    """
    if inst.valuation_class == "binary":
        return check_po_binary(inst, allocation)
    if inst.valuation_class == "lexicographic":
        holds, _ = check_sequencible(inst, allocation)
        violation = Violation(0, None, "the allocation cannot be realized by a picking sequence")
        return FairnessReport.from_violations("po", [] if holds else [violation])

    from .oracle import pareto_improvement

    require_complete(inst, allocation)
    better = pareto_improvement(inst, allocation, budgets)
    if better is None:
        return FairnessReport("po", True)
    gainer = next(i for i in inst.agents if better[i] > inst.value_of(i, allocation.bundles[i]))
    return FairnessReport.from_violations(
        "po", [Violation(gainer, None, f"an allocation with utilities {list(better)} Pareto dominates it")]
    )


def check_property(
    inst: Instance,
    allocation: PartialAllocation,
    prop: str,
    *,
    alpha: Fraction = Fraction(1),
    budgets: Budgets = Budgets(),
    mu: Optional[Sequence[int]] = None,
) -> FairnessReport:
    """Check a single property by name.

    :param inst: The instance.
    :param allocation: A complete allocation.
    :param prop: A property accepted by :func:`parse_property`.
    :param alpha: Factor for ``alpha_mms`` when ``prop`` carries none.
    :param budgets: Limits of the exhaustive searches.
    :param mu: Precomputed maximin shares, computed when needed and not given.
    :return: FairnessReport.
    """
    if prop.strip() in ("alpha_mms", "alpha-mms"):
        name, factor = "alpha_mms", alpha
    else:
        name, factor = parse_property(prop)
    if name == "ef":
        return check_ef(inst, allocation)
    if name == "ef1":
        return check_ef1(inst, allocation)
    if name == "prop":
        return check_prop(inst, allocation)
    if name == "prop1":
        return check_prop1(inst, allocation)
    if name in ("mms", "alpha_mms"):
        if mu is None:
            from .mms import mms_values

            mu = mms_values(inst, budgets).mu
        return check_alpha_mms(inst, allocation, factor if name == "alpha_mms" else Fraction(1), mu)
    if name == "po":
        require_complete(inst, allocation)
        return check_po(inst, allocation, budgets)
    if name == "sequencible":
        holds, _ = check_sequencible(inst, allocation)
        violation = Violation(0, None, "the allocation cannot be realized by a picking sequence")
        return FairnessReport.from_violations("sequencible", [] if holds else [violation])

    from .oracle import mnw_key, mnw_optimum

    require_complete(inst, allocation)
    best = mnw_optimum(inst, budgets)
    key = mnw_key(inst, allocation)
    violations = [] if key == best else [Violation(0, None, f"Nash welfare {key} is below the optimum {best}")]
    return FairnessReport.from_violations("mnw", violations)


def reports_to_dict(reports: Dict[str, FairnessReport]) -> Dict[str, dict]:
    """JSON-ready mapping of property label to report."""
    return {label: report.to_dict() for label, report in reports.items()}
