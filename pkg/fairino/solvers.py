"""Module for the completion solvers and the class dispatcher."""

import logging
from fractions import Fraction
from typing import Dict, List, Literal, Optional, Sequence, Set

from .checkers import (
    build_envy_graph,
    check_ef1,
    check_po_binary,
    check_prop1,
    check_property,
    favorite,
    parse_property,
    picking_sequence,
    property_label,
    run_picking_sequence,
)
from .combinatorics import (
    Arc,
    BipartiteGraph,
    QuotaNetwork,
    describe_network,
    feasible_flow_with_quotas,
    matching_covering_left,
)
from .mms import mms_value_binary, mms_value_lex
from .model import Instance, complete_with
from .oracle import oracle_solve
from .type_definitions import Budgets, PartialAllocation, SolveOutcome, WrongClassError
from .utils import alpha_quota, ceil_div


logger = logging.getLogger(__name__)

ThresholdMode = Literal["mms", "prop1"]
IdenticalMode = Literal["ef1", "prop1"]

SOURCE = ("source",)
SINK = ("sink",)


def _require_class(inst: Instance, expected: str) -> None:
    if inst.valuation_class != expected:
        raise WrongClassError(f"Expected a {expected} instance, got {inst.valuation_class}.")


def _lowest_approver(inst: Instance, good: int) -> int:
    return next((i for i in inst.agents if inst.item_value(i, good)), 0)


def _completion(inst: Instance, assignment: Dict[int, int]) -> PartialAllocation:
    return complete_with(inst, PartialAllocation.from_assignment(inst.n_agents, assignment))


def threshold_quotas(inst: Instance, mode: ThresholdMode, alpha: Fraction = Fraction(1)) -> List[int]:
    """Number of approved unallocated goods each agent must receive.

    ``mms`` asks for ``ceil(alpha * mu_i) - v_i(F_i)``; ``prop1`` asks for ``ceil(v_i(M) / n) - 1 - v_i(F_i)``.

    :param inst: A binary instance.
    :param mode: ``mms`` or ``prop1``.
    :param alpha: Approximation factor of the maximin share.
    :return: One non-negative quota per agent.
    """
    frozen = inst.frozen_allocation()
    quotas = []
    for i in inst.agents:
        own = inst.value_of(i, frozen.bundles[i])
        if mode == "mms":
            quota = alpha_quota(alpha, mms_value_binary(inst, i).mu) - own
        else:
            quota = ceil_div(inst.total_value(i), inst.n_agents) - 1 - own
        quotas.append(max(0, quota))
    return quotas


def threshold_network(inst: Instance, quotas: Sequence[int]) -> QuotaNetwork:
    """The flow network routing unallocated goods to approvers with per-agent lower quotas.

    :param inst: A binary instance.
    :param quotas: One lower quota per agent.
    """
    arcs = [Arc(SOURCE, ("good", g), 1) for g in inst.unallocated()]
    arcs += [
        Arc(("good", g), ("agent", i), 1) for g in inst.unallocated() for i in inst.agents if inst.item_value(i, g)
    ]
    arcs += [Arc(("agent", i), SINK, None, quotas[i]) for i in inst.agents]
    return QuotaNetwork(SOURCE, SINK, tuple(arcs))


def solve_threshold_binary(
    inst: Instance,
    mode: ThresholdMode,
    require_po: bool = False,
    *,
    alpha: Fraction = Fraction(1),
    dump_network: bool = False,
) -> SolveOutcome:
    """Decide whether a completion gives every agent its maximin (or PROP1) threshold under binary valuations.

    Unallocated goods flow from the source to their approvers and on to the sink, where every agent arc carries the
    agent's quota as lower bound. Goods left unrouted go to their lowest indexed approver (agent 0 if nobody approves
    them), so the witness is Pareto optimal whenever the frozen allocation is.

    :param inst: A binary instance.
    :param mode: ``mms`` or ``prop1``.
    :param require_po: Also require Pareto optimality; fails at once if the frozen allocation is not.
    :param alpha: Approximation factor of the maximin share.
    :param dump_network: Log the network arcs at INFO level.
    :return: SolveOutcome with an exact verdict.
    :raises WrongClassError: If the instance is not binary.
    """
    _require_class(inst, "binary")
    if require_po and not check_po_binary(inst, inst.frozen_allocation()).holds:
        return SolveOutcome.none_exists("the frozen allocation gives an approved good to a non-approver")
    quotas = threshold_quotas(inst, mode, alpha)
    logger.debug("Quotas for %s: %s", mode, quotas)
    network = threshold_network(inst, quotas)
    if dump_network:
        for line in describe_network(network):
            logger.info("%s", line)
    flow = feasible_flow_with_quotas(network)
    if flow is None:
        return SolveOutcome.none_exists(f"no flow meets the {mode} quotas {quotas}")
    assignment = {
        tail[1]: head[1] for (tail, head), amount in flow.items() if amount and tail[0] == "good" and head[0] == "agent"
    }
    for good in inst.unallocated():
        assignment.setdefault(good, _lowest_approver(inst, good))
    return SolveOutcome.found(_completion(inst, assignment), f"quota flow ({mode})")


def solve_mms_po_guaranteed_binary(inst: Instance) -> SolveOutcome:
    """Complete a Pareto optimal frozen allocation into an MMS and PO allocation under binary valuations.

    Agents take turns by increasing maximin share; each takes, in index order, the approved unallocated goods it
    still needs. Remaining goods go to their lowest indexed approver.

    :param inst: A binary instance whose frozen allocation is Pareto optimal with respect to the frozen goods.
    :return: SolveOutcome with a witness, or ``not_applicable`` if the frozen allocation is not Pareto optimal.
    :raises WrongClassError: If the instance is not binary.
    """
    _require_class(inst, "binary")
    frozen = inst.frozen_allocation()
    if not check_po_binary(inst, frozen).holds:
        return SolveOutcome.not_applicable("the frozen allocation is not Pareto optimal")
    mu = [mms_value_binary(inst, i).mu for i in inst.agents]
    remaining = list(inst.unallocated())
    assignment: Dict[int, int] = {}
    for i in sorted(inst.agents, key=lambda agent: (mu[agent], agent)):
        need = max(0, mu[i] - inst.value_of(i, frozen.bundles[i]))
        taken = [good for good in remaining if inst.item_value(i, good)][:need]
        for good in taken:
            assignment[good] = i
            remaining.remove(good)
        logger.debug("Agent %s with share %s takes %s", i, mu[i], taken)
    for good in remaining:
        assignment[good] = _lowest_approver(inst, good)
    return SolveOutcome.found(_completion(inst, assignment), "greedy by increasing maximin share")


def extend_sequence(
    inst: Instance, sequence: List[int], allocated: Set[int], good: int
) -> int:
    """Give one more good to a sequencible allocation and extend its picking sequence in place.

    The sequence is run on the allocated goods plus ``good``; the agent that picks ``good`` gets it and a second turn
    right after the first. If nobody picks it, the first agent of the sequence gets an extra last turn.

    :param inst: The instance.
    :param sequence: A picking sequence realizing the allocation over ``allocated``; extended in place.
    :param allocated: The goods allocated so far.
    :param good: The new good.
    :return: The agent receiving ``good``.
    """
    for position, (agent, picked) in enumerate(run_picking_sequence(inst, sequence, allocated | {good})):
        if picked == good:
            sequence.insert(position + 1, agent)
            return agent
    agent = sequence[0] if sequence else 0
    sequence.append(agent)
    return agent


def solve_po_lex(inst: Instance) -> SolveOutcome:
    """Find a Pareto optimal completion under lexicographic valuations.

    The frozen allocation must be sequencible over the frozen goods; each unallocated good, in index order, then
    extends its picking sequence.

    :param inst: A lexicographic instance.
    :return: SolveOutcome with an exact verdict.
    :raises WrongClassError: If the instance is not lexicographic.
    """
    _require_class(inst, "lexicographic")
    frozen = inst.frozen_allocation()
    sequence = picking_sequence(inst, frozen)
    if sequence is None:
        return SolveOutcome.none_exists("the frozen allocation is not sequencible")
    order = list(sequence)
    allocated = set(frozen.allocated)
    assignment: Dict[int, int] = {}
    for good in inst.unallocated():
        assignment[good] = extend_sequence(inst, order, allocated, good)
        allocated.add(good)
    logger.debug("Picking sequence of the completion: %s", order)
    return SolveOutcome.found(_completion(inst, assignment), f"extended picking sequence {order}")


def solve_prop1_po_lex(inst: Instance) -> SolveOutcome:
    """Find a PROP1 and Pareto optimal completion under lexicographic valuations.

    Every allocation is PROP1 under lexicographic valuations, so this is :func:`solve_po_lex`.
    """
    outcome = solve_po_lex(inst)
    return outcome._replace(note=f"{outcome.note}; PROP1 holds for every lexicographic allocation")


def solve_prop1_lex(inst: Instance) -> SolveOutcome:
    """Complete a lexicographic instance with PROP1 by giving every unallocated good to agent 0.

    :raises WrongClassError: If the instance is not lexicographic.
    """
    _require_class(inst, "lexicographic")
    return SolveOutcome.found(
        _completion(inst, dict.fromkeys(inst.unallocated(), 0)), "PROP1 holds for every lexicographic allocation"
    )


def bottom_segment(inst: Instance, agent: int, target: int) -> Set[int]:
    """The least valued unallocated goods that lift the agent's frozen bundle exactly to ``target``, if any.

    :return: The segment, or an empty set when no suffix of the agent's order hits ``target``.
    """
    order = inst.order_by_value(agent, inst.unallocated())
    value = inst.value_of(agent, inst.frozen_allocation().bundles[agent])
    for start in range(len(order) - 1, -1, -1):
        value += inst.item_value(agent, order[start])
        if value == target:
            return set(order[start:])
        if value > target:
            break
    return set()


def solve_mms_lex(inst: Instance) -> SolveOutcome:
    """Decide whether an MMS completion exists under lexicographic valuations.

    Agents whose frozen bundle already reaches their share need nothing. Every other agent gets either one good
    reaching its share on its own, or, for at most one agent, the bottom segment of its order reaching the share
    exactly; both shapes are searched with bipartite matchings.

    :param inst: A lexicographic instance.
    :return: SolveOutcome with an exact verdict.
    :raises WrongClassError: If the instance is not lexicographic.
    """
    _require_class(inst, "lexicographic")
    frozen = inst.frozen_allocation()
    unallocated = inst.unallocated()
    mu = [mms_value_lex(inst, i).mu for i in inst.agents]
    own = [inst.value_of(i, frozen.bundles[i]) for i in inst.agents]
    demanding = [i for i in inst.agents if mu[i] > own[i]]
    logger.debug("Shares %s, frozen values %s, demanding agents %s", mu, own, demanding)
    if not demanding:
        return SolveOutcome.found(_completion(inst, dict.fromkeys(unallocated, 0)), "frozen bundles meet every share")

    singles = {i: {g for g in unallocated if own[i] + inst.item_value(i, g) >= mu[i]} for i in demanding}
    segments = {i: bottom_segment(inst, i, mu[i]) for i in demanding}

    def matched(agents: List[int], excluded: Set[int]) -> Optional[Dict[int, int]]:
        goods = tuple(g for g in unallocated if g not in excluded)
        edges = tuple((i, g) for i in agents for g in goods if g in singles[i])
        return matching_covering_left(BipartiteGraph(tuple(agents), goods, edges))

    def finish(assignment: Dict[int, int], note: str) -> SolveOutcome:
        for good in unallocated:
            assignment.setdefault(good, 0)
        return SolveOutcome.found(_completion(inst, assignment), note)

    matching = matched(demanding, set())
    if matching is not None:
        return finish({good: agent for agent, good in matching.items()}, "one good per demanding agent")
    for i in demanding:
        if not segments[i]:
            continue
        matching = matched([j for j in demanding if j != i], segments[i])
        if matching is not None:
            assignment = dict.fromkeys(segments[i], i)
            assignment.update({good: agent for agent, good in matching.items()})
            return finish(assignment, f"bottom segment for agent {i}, one good for the others")
    return SolveOutcome.none_exists("no matching covers the demanding agents")


def round_robin(inst: Instance, allocation: PartialAllocation, order: Sequence[int]) -> PartialAllocation:
    """Hand out the goods missing from ``allocation`` by round robin over ``order``.

    At its turn each agent picks its favorite remaining good, lowest index on ties.
    """
    remaining = set(range(inst.m)) - allocation.allocated
    bundles = [set(bundle) for bundle in allocation.bundles]
    while remaining:
        for agent in order:
            good = favorite(inst, agent, remaining)
            if good is None:
                break
            bundles[agent].add(good)
            remaining.discard(good)
    return PartialAllocation.from_bundles(bundles)


def solve_ef1_acyclic(inst: Instance) -> SolveOutcome:
    """Complete an EF1 frozen allocation with an acyclic envy graph by round robin in topological order.

    :param inst: An instance of any valuation class.
    :return: SolveOutcome with a witness, or ``not_applicable`` if the preconditions fail.
    """
    frozen = inst.frozen_allocation()
    if not check_ef1(inst, frozen, complete=False).holds:
        return SolveOutcome.not_applicable("the frozen allocation is not EF1")
    graph = build_envy_graph(inst, frozen)
    if graph.order is None:
        return SolveOutcome.not_applicable("the envy graph of the frozen allocation has a cycle")
    return SolveOutcome.found(round_robin(inst, frozen, graph.order), f"round robin in order {list(graph.order)}")


def _violated(inst: Instance, allocation: PartialAllocation, mode: IdenticalMode) -> Optional[int]:
    if mode == "ef1":
        report = check_ef1(inst, allocation, complete=False)
    else:
        report = check_prop1(inst, allocation, complete=False)
    return report.violations[0].agent if report.violations else None


def solve_two_identical(inst: Instance, mode: IdenticalMode) -> SolveOutcome:
    """Decide EF1 or PROP1 completion for two agents with identical valuations.

    While the disadvantaged agent fails the target over the allocated goods, it receives unallocated goods in index
    order. Running out of goods first means no completion exists; otherwise round robin in the order of the envy
    graph finishes the allocation.

    :param inst: An instance with two agents sharing one value vector.
    :param mode: ``ef1`` or ``prop1``.
    :return: SolveOutcome with an exact verdict, or ``not_applicable`` if the preconditions fail.
    """
    if inst.n_agents != 2 or not inst.is_identical():
        return SolveOutcome.not_applicable("needs two agents with identical valuations")
    allocation = inst.frozen_allocation()
    remaining = list(inst.unallocated())
    disadvantaged = _violated(inst, allocation, mode)
    poured = []
    while disadvantaged is not None and _violated(inst, allocation, mode) == disadvantaged:
        if not remaining:
            return SolveOutcome.none_exists(f"agent {disadvantaged} fails {mode} even with every unallocated good")
        good = remaining.pop(0)
        allocation = allocation.with_good(disadvantaged, good)
        poured.append(good)
    if poured:
        logger.debug("Agent %s received %s before round robin", disadvantaged, poured)
    graph = build_envy_graph(inst, allocation)
    order = graph.order or (0, 1)
    note = f"poured {poured}, then round robin in {list(order)}"
    return SolveOutcome.found(round_robin(inst, allocation, order), note)


def solve(
    inst: Instance,
    prop: str,
    *,
    po: bool = False,
    alpha: Fraction = Fraction(1),
    budgets: Budgets = Budgets(),
    force_oracle: bool = False,
    dump_network: bool = False,
) -> SolveOutcome:
    """Solve a completion problem with the best algorithm for the valuation class.

    Structural solvers answer where one applies; everything else goes to the exhaustive oracle. Every witness is
    checked against the requested properties before it is returned.

    :param inst: The instance.
    :param prop: ``ef``, ``ef1``, ``prop``, ``prop1``, ``mms``, ``alpha_mms`` or ``po``.
    :param po: Also require Pareto optimality.
    :param alpha: Approximation factor for ``mms``/``alpha_mms``.
    :param budgets: Limits of the exhaustive searches.
    :param force_oracle: Skip the structural solvers.
    :param dump_network: Log the quota network of the binary flow solvers.
    :return: SolveOutcome.
    :raises RuntimeError: If a witness fails its checks.
    """
    name, factor = parse_property(prop) if prop not in ("mms", "alpha_mms") else (prop, alpha)
    if name in ("mms", "alpha_mms"):
        name = "mms" if factor == 1 else "alpha_mms"
    if name == "po":
        name, po = "", True
    wanted = [property_label(name, factor)] if name else []
    if po:
        wanted.append("po")

    outcome = None if force_oracle else _structural(inst, name, po, factor, dump_network)
    if outcome is None or outcome.status == "not_applicable":
        if outcome is not None:
            logger.info("Structural solver not applicable (%s); using the oracle", outcome.note)
        outcome = oracle_solve(inst, wanted, budgets=budgets)

    if outcome.witness is not None:
        for label in wanted:
            report = check_property(inst, outcome.witness, label, budgets=budgets)
            if not report.holds:
                raise RuntimeError(f"Witness of {outcome.note!r} fails {label}: {report.to_dict()}")
    return outcome


def _structural(
    inst: Instance, name: str, po: bool, alpha: Fraction, dump_network: bool
) -> Optional[SolveOutcome]:
    if inst.valuation_class == "binary":
        if name in ("mms", "alpha_mms"):
            if po and alpha == 1:
                guaranteed = solve_mms_po_guaranteed_binary(inst)
                if guaranteed.status == "witness":
                    return guaranteed
            return solve_threshold_binary(inst, "mms", po, alpha=alpha, dump_network=dump_network)
        if name == "prop1":
            return solve_threshold_binary(inst, "prop1", po, dump_network=dump_network)
    if inst.valuation_class == "lexicographic":
        if name == "" or (name == "prop1" and po):
            return solve_prop1_po_lex(inst) if name else solve_po_lex(inst)
        if name == "prop1":
            return solve_prop1_lex(inst)
        if name == "mms" and not po:
            return solve_mms_lex(inst)
    if inst.valuation_class == "binary" and name == "":
        if not check_po_binary(inst, inst.frozen_allocation()).holds:
            return SolveOutcome.none_exists("the frozen allocation gives an approved good to a non-approver")
        assignment = {good: _lowest_approver(inst, good) for good in inst.unallocated()}
        return SolveOutcome.found(_completion(inst, assignment), "every good to its lowest indexed approver")
    if name == "" and inst.is_identical():
        return SolveOutcome.found(
            _completion(inst, dict.fromkeys(inst.unallocated(), 0)),
            "every allocation is Pareto optimal under identical valuations",
        )
    if name in ("ef1", "prop1") and (not po or inst.is_identical()):
        if inst.n_agents == 2 and inst.is_identical():
            return solve_two_identical(inst, "ef1" if name == "ef1" else "prop1")
        if name == "ef1":
            return solve_ef1_acyclic(inst)
    return None
