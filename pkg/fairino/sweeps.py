"""Module for seeded instance generators and solver versus oracle sweeps."""

import itertools
import logging
import random
from typing import Callable, Dict, Iterator, List, NamedTuple, Optional, Sequence, Set, Tuple

from .checkers import build_envy_graph, check_ef1, check_property
from .model import Instance, instance_to_dict
from .oracle import oracle_solve
from .solvers import (
    solve_ef1_acyclic,
    solve_mms_lex,
    solve_mms_po_guaranteed_binary,
    solve_po_lex,
    solve_prop1_po_lex,
    solve_threshold_binary,
    solve_two_identical,
)
from .type_definitions import Budgets, Mismatch, PartialAllocation, SolveOutcome


logger = logging.getLogger(__name__)

FROZEN_SHARE = 0.4


def _frozen(rng: random.Random, n: int, m: int, share: float = FROZEN_SHARE) -> Dict[int, int]:
    return {good: rng.randrange(n) for good in range(m) if rng.random() < share}


def random_binary(rng: random.Random, n: int, m: int) -> Instance:
    """A binary instance with uniform approvals and a random frozen map."""
    values = [[rng.randint(0, 1) for _ in range(m)] for _ in range(n)]
    return Instance.from_values(values, valuation_class="binary", frozen=_frozen(rng, n, m))


def random_po_binary(rng: random.Random, n: int, m: int) -> Instance:
    """A binary instance whose frozen goods all sit with an approver (or anywhere if nobody approves them)."""
    inst = random_binary(rng, n, m)
    frozen = {}
    for good in _frozen(rng, n, m):
        approvers = [i for i in inst.agents if inst.item_value(i, good)]
        frozen[good] = rng.choice(approvers) if approvers else rng.randrange(n)
    return inst.with_frozen(frozen)


def random_lex(rng: random.Random, n: int, m: int) -> Instance:
    """A lexicographic instance with uniform random rankings and a random frozen map."""
    rankings = []
    for _ in range(n):
        ranking = list(range(m))
        rng.shuffle(ranking)
        rankings.append(ranking)
    return Instance.from_rankings(rankings, frozen=_frozen(rng, n, m))


def random_additive(rng: random.Random, n: int, m: int, max_value: int = 5) -> Instance:
    """An additive instance with values in ``0..max_value`` and a random frozen map."""
    values = [[rng.randint(0, max_value) for _ in range(m)] for _ in range(n)]
    return Instance.from_values(values, frozen=_frozen(rng, n, m))


def random_identical(rng: random.Random, m: int, n: int = 2, max_value: int = 3) -> Instance:
    """An additive instance where all agents share one random value vector."""
    row = [rng.randint(0, max_value) for _ in range(m)]
    return Instance.from_values([row] * n, frozen=_frozen(rng, n, m, share=0.5))


def random_ef1_acyclic(rng: random.Random, n: int, m: int, attempts: int = 50) -> Instance:
    """An additive instance whose frozen allocation is EF1 with an acyclic envy graph.

    Frozen maps are redrawn until both hold; after ``attempts`` failures nothing is frozen.
    """
    inst = random_additive(rng, n, m)
    for _ in range(attempts):
        frozen = inst.frozen_allocation()
        if check_ef1(inst, frozen, complete=False).holds and build_envy_graph(inst, frozen).acyclic:
            return inst
        inst = inst.with_frozen(_frozen(rng, n, m))
    return inst.with_frozen({})


def random_allocation(rng: random.Random, inst: Instance) -> PartialAllocation:
    """A uniformly random complete allocation extending the frozen allocation."""
    bundles = [set(bundle) for bundle in inst.frozen_allocation().bundles]
    for good in inst.unallocated():
        bundles[rng.randrange(inst.n_agents)].add(good)
    return PartialAllocation.from_bundles(bundles)


def frozen_patterns(n: int, m: int, count: int, seed: int = 0) -> List[Dict[int, int]]:
    """A fixed list of distinct frozen maps, starting with the empty one.

    Every map is listed when there are at most ``count`` of them; otherwise a seeded sample is taken.
    """
    every = (n + 1) ** m
    if every <= count:
        cells = itertools.product([None, *range(n)], repeat=m)
        return [{good: agent for good, agent in enumerate(cell) if agent is not None} for cell in cells]
    rng = random.Random(seed)
    patterns: List[Dict[int, int]] = [{}]
    seen: Set[Tuple[Tuple[int, int], ...]] = {()}
    while len(patterns) < count:
        pattern = _frozen(rng, n, m, share=rng.random())
        key = tuple(sorted(pattern.items()))
        if key not in seen:
            seen.add(key)
            patterns.append(pattern)
    return patterns


def binary_rows(n: int, m: int, patterns: int = 50, seed: int = 0) -> Iterator[Instance]:
    """Every binary valuation row for agent 0, under a fixed set of frozen patterns.

    A binary maximin share depends on the agent's own row and the frozen map only, so this covers every valuation
    matrix for agent 0.
    """
    for pattern in frozen_patterns(n, m, patterns, seed):
        for row in itertools.product((0, 1), repeat=m):
            values = [list(row)] + [[0] * m for _ in range(n - 1)]
            yield Instance.from_values(values, valuation_class="binary", frozen=pattern)


def identical_pairs(m: int, max_value: int = 3) -> Iterator[Instance]:
    """Every two agent identical instance with values in ``0..max_value`` and every frozen map."""
    for row in itertools.product(range(max_value + 1), repeat=m):
        for cell in itertools.product((None, 0, 1), repeat=m):
            frozen = {good: agent for good, agent in enumerate(cell) if agent is not None}
            yield Instance.from_values([list(row)] * 2, frozen=frozen)


class SolverSpec(NamedTuple):
    """NamedTuple describing a solver under verification.

    :param generate: Builds a random instance from a generator, an agent count and a good count.
    :param solve: The solver.
    :param properties: The property labels the solver decides.
    :param agents: Largest agent count drawn by default.
    :param goods: Largest good count drawn by default.
    :param guaranteed: The solver must always find a witness instead of agreeing with the oracle.
    """

    generate: Callable[[random.Random, int, int], Instance]
    solve: Callable[[Instance], SolveOutcome]
    properties: Tuple[str, ...]
    agents: int = 3
    goods: int = 5
    guaranteed: bool = False


SOLVERS: Dict[str, SolverSpec] = {
    "threshold-mms": SolverSpec(random_binary, lambda inst: solve_threshold_binary(inst, "mms"), ("mms",)),
    "threshold-prop1": SolverSpec(random_binary, lambda inst: solve_threshold_binary(inst, "prop1"), ("prop1",)),
    "threshold-mms-po": SolverSpec(
        random_binary, lambda inst: solve_threshold_binary(inst, "mms", True), ("mms", "po")
    ),
    "threshold-prop1-po": SolverSpec(
        random_binary, lambda inst: solve_threshold_binary(inst, "prop1", True), ("prop1", "po")
    ),
    "mms-po-binary": SolverSpec(random_po_binary, solve_mms_po_guaranteed_binary, ("mms", "po"), guaranteed=True),
    "po-lex": SolverSpec(random_lex, solve_po_lex, ("po",), goods=6),
    "prop1-po-lex": SolverSpec(random_lex, solve_prop1_po_lex, ("prop1", "po"), goods=6),
    "mms-lex": SolverSpec(random_lex, solve_mms_lex, ("mms",), goods=6),
    "ef1-acyclic": SolverSpec(random_ef1_acyclic, solve_ef1_acyclic, ("ef1",), goods=6, guaranteed=True),
    "two-identical-ef1": SolverSpec(
        lambda rng, n, m: random_identical(rng, m), lambda inst: solve_two_identical(inst, "ef1"), ("ef1",), agents=2
    ),
    "two-identical-prop1": SolverSpec(
        lambda rng, n, m: random_identical(rng, m),
        lambda inst: solve_two_identical(inst, "prop1"),
        ("prop1",),
        agents=2,
    ),
}


def compare(
    inst: Instance, spec: SolverSpec, case: int = 0, budgets: Budgets = Budgets()
) -> Optional[Mismatch]:
    """Run one solver on one instance and compare it with the oracle.

    :return: A Mismatch, or None when they agree and any witness passes every property.
    """
    outcome = spec.solve(inst)
    if outcome.witness is not None:
        for label in spec.properties:
            report = check_property(inst, outcome.witness, label, budgets=budgets)
            if not report.holds:
                return Mismatch(case, instance_to_dict(inst), outcome.status, "-", f"witness fails {label}")
    if spec.guaranteed:
        if outcome.status != "witness":
            return Mismatch(case, instance_to_dict(inst), outcome.status, "-", outcome.note)
        return None
    expected = oracle_solve(inst, spec.properties, budgets=budgets)
    if expected.status != outcome.status:
        return Mismatch(case, instance_to_dict(inst), outcome.status, expected.status, outcome.note)
    return None


def verify_instances(
    instances: Sequence[Instance], spec: SolverSpec, budgets: Budgets = Budgets()
) -> List[Mismatch]:
    """Compare a solver with the oracle on every instance."""
    mismatches = []
    for case, inst in enumerate(instances):
        mismatch = compare(inst, spec, case, budgets)
        if mismatch is not None:
            logger.warning("Case %s: solver says %s, oracle says %s", case, mismatch.solver, mismatch.oracle)
            mismatches.append(mismatch)
    return mismatches


def random_instances(
    spec: SolverSpec, cases: int, seed: int, agents: Optional[int] = None, goods: Optional[int] = None
) -> List[Instance]:
    """Seeded random instances for a solver, with ``1..agents`` agents and ``0..goods`` goods."""
    rng = random.Random(seed)
    top_agents = agents or spec.agents
    top_goods = goods if goods is not None else spec.goods
    return [spec.generate(rng, rng.randint(1, top_agents), rng.randint(0, top_goods)) for _ in range(cases)]


def verify_solver(
    name: str,
    cases: int = 1000,
    seed: int = 0,
    *,
    agents: Optional[int] = None,
    goods: Optional[int] = None,
    budgets: Budgets = Budgets(),
) -> List[Mismatch]:
    """Sweep a named solver against the oracle on seeded random instances.

    :param name: A key of :data:`SOLVERS`.
    :param cases: Number of instances.
    :param seed: Seed of the generator.
    :param agents: Largest agent count, the solver default if None.
    :param goods: Largest good count, the solver default if None.
    :param budgets: Limits of the exhaustive searches.
    :return: The mismatches, empty when the solver agrees with the oracle everywhere.
    :raises ValueError: If the solver name is unknown.
    """
    if name not in SOLVERS:
        raise ValueError(f"Unknown solver: {name!r}. Use one of {', '.join(SOLVERS)}.")
    spec = SOLVERS[name]
    logger.info("Verifying %s on %s cases (seed %s)", name, cases, seed)
    return verify_instances(random_instances(spec, cases, seed, agents, goods), spec, budgets)
