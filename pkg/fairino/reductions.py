"""Module for hardness gadgets, counterexample families and their source-problem oracles."""

import itertools
import logging
from fractions import Fraction
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple, Union

import networkx as nx

from .checkers import check_property
from .model import Instance
from .type_definitions import AllocationError, PartialAllocation, ReductionError
from .utils import harmonic, lcm_range, parse_alpha


logger = logging.getLogger(__name__)

PartitionVariant = Literal[
    "two_agent_ef1", "two_agent_prop1", "three_identical", "three_identical_prop1", "mms_two_agent"
]
Family = Literal["no_mms_lex", "no_alpha_mms_additive", "no_alpha_mms_binary", "mnw_not_ef1"]

PARTITION_VARIANTS: Tuple[str, ...] = (
    "two_agent_ef1",
    "two_agent_prop1",
    "three_identical",
    "three_identical_prop1",
    "mms_two_agent",
)
FAMILIES: Tuple[str, ...] = ("no_mms_lex", "no_alpha_mms_additive", "no_alpha_mms_binary", "mnw_not_ef1")
WITNESS_VARIANTS: Tuple[str, ...] = (*PARTITION_VARIANTS, "equitable_coloring", "rainbow_coloring")

# property each reduced instance is built for
TARGET_PROPERTY: Dict[str, str] = {
    "two_agent_ef1": "ef1",
    "two_agent_prop1": "prop1",
    "three_identical": "ef1",
    "three_identical_prop1": "prop1",
    "mms_two_agent": "mms",
    "equitable_coloring": "ef1",
    "rainbow_coloring": "ef1",
}

MAX_HARMONIC_AGENTS = 64

Coloring = Dict[str, int]
Witness = Union[Tuple[int, ...], Coloring]


def _check_weights(weights: Sequence[int]) -> int:
    if not weights:
        raise ReductionError("Partition needs at least one weight.")
    for weight in weights:
        if not isinstance(weight, int) or isinstance(weight, bool) or weight < 1:
            raise ReductionError(f"Invalid weight: {weight!r}.")
    if sum(weights) % 2:
        raise ReductionError(f"The weights sum to {sum(weights)}, which is odd.")
    return sum(weights) // 2


def partition_split(weights: Sequence[int]) -> Optional[Tuple[int, ...]]:
    """Find a set of weight positions summing to half the total.

    :param weights: Positive integers.
    :return: The first such set of positions (by bitmask order), or None if there is none or the sum is odd.
    """
    if sum(weights) % 2:
        return None
    half = sum(weights) // 2
    for mask in range(1 << len(weights)):
        chosen = tuple(k for k in range(len(weights)) if mask >> k & 1)
        if sum(weights[k] for k in chosen) == half:
            return chosen
    return None


def reduce_partition(weights: Sequence[int], variant: PartitionVariant) -> Instance:
    """Build the completion instance encoding a Partition instance.

    The unallocated goods ``w1..wm`` come first and are worth their weight to every agent; the frozen goods follow.

    * ``two_agent_ef1``: ``f1`` to agent 0 and ``f2`` to agent 1, each worth ``T`` to the other agent only.
    * ``two_agent_prop1``: ``f1, f2`` to agent 0 and ``f3, f4`` to agent 1, each worth ``T`` to the other agent only.
    * ``three_identical``: three identical agents; ``f1, f2`` worth ``T`` each, frozen to agent 0.
    * ``three_identical_prop1``: three identical agents; ``f`` and ``g`` worth ``max(w)`` frozen to agents 1 and 2,
      and ``T + 4 max(w)`` unit goods ``e1..`` frozen to agent 0.
    * ``mms_two_agent``: weights doubled; ``f1`` to agent 0 and ``f2`` to agent 1, each worth 1 to the other agent.

    :param weights: Positive integers with an even sum ``2T``.
    :param variant: The gadget to build.
    :return: An additive Instance with a completion meeting the target property iff the weights split evenly.
    :raises ReductionError: If the sum is odd, a weight exceeds ``T`` in a two agent fairness variant, or the variant
        is unknown.
    """
    half = _check_weights(weights)
    items = [f"w{k + 1}" for k in range(len(weights))]
    m = len(weights)
    if variant in ("two_agent_ef1", "two_agent_prop1"):
        if max(weights) > half:
            raise ReductionError(f"Weight {max(weights)} exceeds half the total ({half}).")
        copies = 1 if variant == "two_agent_ef1" else 2
        frozen_names = [f"f{j + 1}" for j in range(2 * copies)]
        own = [0] * copies
        cross = [half] * copies
        values = [list(weights) + own + cross, list(weights) + cross + own]
        frozen = {m + j: j // copies for j in range(2 * copies)}
        return Instance.from_values(values, goods=items + frozen_names, frozen=frozen)
    if variant == "three_identical":
        row = list(weights) + [half, half]
        return Instance.from_values([row] * 3, goods=items + ["f1", "f2"], frozen={m: 0, m + 1: 0})
    if variant == "three_identical_prop1":
        top = max(weights)
        units = half + 4 * top
        row = list(weights) + [top, top] + [1] * units
        frozen = {m: 1, m + 1: 2, **{m + 2 + u: 0 for u in range(units)}}
        names = items + ["f", "g"] + [f"e{u + 1}" for u in range(units)]
        return Instance.from_values([row] * 3, goods=names, frozen=frozen)
    if variant == "mms_two_agent":
        doubled = [2 * weight for weight in weights]
        values = [doubled + [0, 1], doubled + [1, 0]]
        return Instance.from_values(values, goods=items + ["f1", "f2"], frozen={m: 0, m + 1: 1})
    raise ReductionError(f"Unknown Partition variant: {variant!r}. Use one of {', '.join(PARTITION_VARIANTS)}.")


def _graph(vertices: Sequence[str], edges: Sequence[Tuple[str, str]]) -> "nx.Graph":
    if not vertices:
        raise ReductionError("The graph needs at least one vertex.")
    if len(set(vertices)) != len(vertices):
        raise ReductionError("Vertex names must be unique.")
    graph = nx.Graph()
    graph.add_nodes_from(vertices)
    for u, v in edges:
        if u not in graph or v not in graph:
            raise ReductionError(f"Edge ({u!r}, {v!r}) names an unknown vertex.")
        if u == v:
            raise ReductionError(f"Self loop on {u!r}.")
        if graph.has_edge(u, v):
            raise ReductionError(f"Duplicate edge ({u!r}, {v!r}).")
        graph.add_edge(u, v)
    return graph


def is_equitable_coloring(
    vertices: Sequence[str], edges: Sequence[Tuple[str, str]], k: int, coloring: Coloring
) -> bool:
    """Whether a coloring is proper and uses each of the ``k`` colors on exactly ``|V| / k`` vertices."""
    if set(coloring) != set(vertices) or any(not 0 <= color < k for color in coloring.values()):
        return False
    if any(coloring[u] == coloring[v] for u, v in edges):
        return False
    sizes = [sum(1 for color in coloring.values() if color == c) for c in range(k)]
    return len(set(sizes)) == 1


def equitable_coloring(vertices: Sequence[str], edges: Sequence[Tuple[str, str]], k: int) -> Optional[Coloring]:
    """Find an equitable proper coloring with ``k`` colors by trying every coloring, or return None."""
    _graph(vertices, edges)
    if k < 1 or len(vertices) % k:
        return None
    for colors in itertools.product(range(k), repeat=len(vertices)):
        coloring = dict(zip(vertices, colors))
        if is_equitable_coloring(vertices, edges, k, coloring):
            return coloring
    return None


def reduce_equitable_coloring(vertices: Sequence[str], edges: Sequence[Tuple[str, str]], k: int) -> Instance:
    """Build the binary instance that has an EF1 completion iff the graph has an equitable ``k`` coloring.

    Agents are one per edge (``e1..``), one per color (``c1..ck``) and a special agent ``s``. Goods are one per vertex
    (``v:<name>``) and ``t + 1`` dummies (``d1..``) frozen to ``s``, with ``t = |V| / k``. Color agents approve every
    good, edge agents approve their two endpoints and ``s`` approves the dummies.

    :param vertices: Vertex names.
    :param edges: Pairs of vertex names.
    :param k: Number of colors.
    :return: A binary Instance whose frozen allocation is Pareto optimal.
    :raises ReductionError: If the graph is malformed, ``k < 1`` or ``|V|`` is not a multiple of ``k``.
    """
    _graph(vertices, edges)
    if k < 1:
        raise ReductionError(f"Invalid number of colors: {k}.")
    if len(vertices) % k:
        raise ReductionError(f"{len(vertices)} vertices cannot be split into {k} classes of equal size.")
    per_class = len(vertices) // k
    q, dummies = len(vertices), per_class + 1
    goods = [f"v:{v}" for v in vertices] + [f"d{r + 1}" for r in range(dummies)]
    position = {v: index for index, v in enumerate(vertices)}
    values: List[List[int]] = []
    for u, v in edges:
        row = [0] * (q + dummies)
        row[position[u]] = row[position[v]] = 1
        values.append(row)
    values += [[1] * (q + dummies) for _ in range(k)]
    values.append([0] * q + [1] * dummies)
    names = [f"e{j + 1}" for j in range(len(edges))] + [f"c{i + 1}" for i in range(k)] + ["s"]
    special = len(names) - 1
    logger.debug("Equitable coloring gadget: %s agents, %s goods", len(names), len(goods))
    return Instance.from_values(
        values,
        valuation_class="binary",
        goods=goods,
        frozen={q + r: special for r in range(dummies)},
        agent_names=names,
    )


def _check_hypergraph(vertices: Sequence[str], hyperedges: Sequence[Sequence[str]], k: int) -> None:
    if not vertices:
        raise ReductionError("The hypergraph needs at least one vertex.")
    if len(set(vertices)) != len(vertices):
        raise ReductionError("Vertex names must be unique.")
    if k < 1:
        raise ReductionError(f"Invalid number of colors: {k}.")
    known = set(vertices)
    for edge in hyperedges:
        if not edge or len(set(edge)) != len(edge) or not set(edge) <= known:
            raise ReductionError(f"Malformed hyperedge: {list(edge)!r}.")
        if len(edge) > k:
            raise ReductionError(f"Hyperedge {list(edge)!r} has more than {k} vertices.")


def is_rainbow_coloring(hyperedges: Sequence[Sequence[str]], k: int, coloring: Coloring) -> bool:
    """Whether every hyperedge sees pairwise different colors among ``0..k-1``."""
    if any(not 0 <= color < k for color in coloring.values()):
        return False
    for edge in hyperedges:
        if any(v not in coloring for v in edge):
            return False
        if len({coloring[v] for v in edge}) != len(edge):
            return False
    return True


def rainbow_coloring(vertices: Sequence[str], hyperedges: Sequence[Sequence[str]], k: int) -> Optional[Coloring]:
    """Find a rainbow coloring with ``k`` colors by trying every coloring, or return None."""
    _check_hypergraph(vertices, hyperedges, k)
    for colors in itertools.product(range(k), repeat=len(vertices)):
        coloring = dict(zip(vertices, colors))
        if is_rainbow_coloring(hyperedges, k, coloring):
            return coloring
    return None


def reduce_rainbow_coloring(vertices: Sequence[str], hyperedges: Sequence[Sequence[str]], k: int) -> Instance:
    """Build the lexicographic instance that has an EF1 completion iff the hypergraph has a rainbow ``k`` coloring.

    Two singleton hyperedges per vertex are appended. With ``r`` hyperedges the agents are the hyperedge agents
    ``e1..er``, the color agents ``c1..ck`` and the pair agents ``p<j>:<v>``; each holds one frozen good named
    ``g:<agent>``. The vertex goods ``v:<name>`` are the unallocated goods. Ties inside a preference tier follow good
    index order.

    :param vertices: Vertex names.
    :param hyperedges: Lists of vertex names.
    :param k: Number of colors.
    :return: A lexicographic Instance.
    :raises ReductionError: If the hypergraph is malformed or a hyperedge has more than ``k`` vertices.
    """
    _check_hypergraph(vertices, hyperedges, k)
    edges = [list(edge) for edge in hyperedges] + [[v] for v in vertices for _ in range(2)]
    q, r = len(vertices), len(edges)
    agent_names = (
        [f"e{j + 1}" for j in range(r)]
        + [f"c{i + 1}" for i in range(k)]
        + [f"p{j + 1}:{v}" for j in range(r) for v in vertices]
    )
    goods = [f"v:{v}" for v in vertices] + [f"g:{name}" for name in agent_names]
    m = len(goods)
    vertex_good = {v: index for index, v in enumerate(vertices)}
    edge_good = [q + j for j in range(r)]
    color_good = [q + r + i for i in range(k)]
    pair_good = {(j, v): q + r + k + j * q + position for j in range(r) for position, v in enumerate(vertices)}
    pair_goods = sorted(pair_good.values())

    def ranking(*tiers: Sequence[int]) -> List[int]:
        head = [good for tier in tiers for good in tier]
        return head + [good for good in range(m) if good not in set(head)]

    rankings = []
    for j, edge in enumerate(edges):
        others = [good for good in edge_good if good != edge_good[j]] + pair_goods
        rankings.append(ranking(sorted(vertex_good[v] for v in edge), others, [edge_good[j]]))
    rankings += [ranking([color_good[i]]) for i in range(k)]
    for j in range(r):
        for v in vertices:
            own = pair_good[(j, v)]
            rest = [good for good in pair_goods if good != own]
            rankings.append(ranking([vertex_good[v], edge_good[j]], rest, [own]))
    logger.debug("Rainbow coloring gadget: %s agents, %s goods", len(agent_names), m)
    return Instance.from_rankings(
        rankings, goods=goods, frozen={q + agent: agent for agent in range(len(agent_names))}, agent_names=agent_names
    )


def gen_counterexample(family: Family, **params: Any) -> Instance:
    """Build a counterexample instance.

    * ``no_mms_lex``: two lexicographic agents, goods ``g1, g2, f1, f2``; no MMS completion although the frozen
      allocation is Pareto optimal on the frozen goods.
    * ``mnw_not_ef1``: three binary agents; every maximum Nash welfare completion fails EF1 while an EF1 and PO
      completion exists.
    * ``no_alpha_mms_binary(alpha=1, x=None, y=None, n=None)``: binary agents without an ``alpha``-MMS completion.
      Needs ``x / y <= alpha`` and ``n * x > y``; by default ``x / y = alpha`` and ``n = y // x + 1``.
    * ``no_alpha_mms_additive(alpha=1, ell=None)``: additive agents without an ``alpha``-MMS completion, with the
      least ``n`` such that ``alpha * H_n > 2`` and ``max(n, ell)`` unit goods. Values are scaled by
      ``S = lcm(1..n) * (n + 1)``: a unit good is worth ``S``, ``f_j`` is worth ``j`` to agents ``i >= j`` and
      ``ell * S / i`` to agent ``i < j``.

    :param family: The family name.
    :param params: Family parameters.
    :return: The instance.
    :raises ReductionError: If the family is unknown or the parameters are invalid.
    """
    try:
        if family == "no_mms_lex":
            _no_params(family, params)
            return Instance.from_rankings(
                [[0, 1, 2, 3], [2, 3, 0, 1]], goods=["g1", "g2", "f1", "f2"], frozen={2: 0, 3: 1}
            )
        if family == "mnw_not_ef1":
            _no_params(family, params)
            values = [[1, 1, 0, 0, 0, 0, 0, 0], [1] * 8, [0, 0, 0, 0, 1, 1, 1, 1]]
            goods = ["g1", "g2", "g3", "g4", "f1", "f2", "f3", "f4"]
            return Instance.from_values(values, valuation_class="binary", goods=goods, frozen={4: 2, 5: 2, 6: 2, 7: 2})
        if family == "no_alpha_mms_binary":
            return _no_alpha_mms_binary(**params)
        if family == "no_alpha_mms_additive":
            return _no_alpha_mms_additive(**params)
    except ReductionError:
        raise
    except (TypeError, ValueError) as exc:
        raise ReductionError(f"Invalid parameters for {family}: {exc}") from exc
    raise ReductionError(f"Unknown family: {family!r}. Use one of {', '.join(FAMILIES)}.")


def _no_params(family: str, params: Dict[str, Any]) -> None:
    if params:
        raise ReductionError(f"Family {family} takes no parameters, got {sorted(params)}.")


def _no_alpha_mms_binary(
    alpha: Union[str, Fraction] = Fraction(1), x: Optional[int] = None, y: Optional[int] = None, n: Optional[int] = None
) -> Instance:
    factor = parse_alpha(alpha)
    if x is None and y is None:
        x, y = factor.numerator, factor.denominator
    if x is None or y is None or x < 1 or y < 1:
        raise ReductionError("Give both x and y as positive integers.")
    if Fraction(x, y) > factor:
        raise ReductionError(f"x / y = {Fraction(x, y)} exceeds alpha = {factor}.")
    n = y // x + 1 if n is None else n
    if n * x <= y:
        raise ReductionError(f"Need n > y / x, got n = {n}.")
    goods = [f"g{j + 1}" for j in range(y)] + [f"g{i + 1}_{j + 1}" for i in range(n) for j in range(y)]
    values = [[1] * y + [0 if owner == i else 1 for owner in range(n) for _ in range(y)] for i in range(n)]
    frozen = {y + owner * y + j: owner for owner in range(n) for j in range(y)}
    return Instance.from_values(values, valuation_class="binary", goods=goods, frozen=frozen)


def _no_alpha_mms_additive(alpha: Union[str, Fraction] = Fraction(1), ell: Optional[int] = None) -> Instance:
    factor = parse_alpha(alpha)
    n = 1
    while factor * harmonic(n) <= 2:
        n += 1
        if n > MAX_HARMONIC_AGENTS:
            raise ReductionError(f"alpha = {factor} needs more than {MAX_HARMONIC_AGENTS} agents.")
    units = max(n, ell or 0)
    scale = lcm_range(n) * (n + 1)
    values = []
    for i in range(1, n + 1):
        frozen_part = [j if j <= i else units * scale // i for j in range(1, n + 1)]
        values.append(frozen_part + [scale] * units)
    goods = [f"f{j}" for j in range(1, n + 1)] + [f"u{u}" for u in range(1, units + 1)]
    logger.debug("Harmonic family for alpha %s: %s agents, %s unit goods", factor, n, units)
    return Instance.from_values(values, goods=goods, frozen={j: j for j in range(n)})


def _require_property(variant: str, inst: Instance, allocation: PartialAllocation) -> None:
    report = check_property(inst, allocation, TARGET_PROPERTY[variant])
    if not report.holds:
        raise AllocationError(f"The allocation fails {report.property}: {report.violations[0].explanation}.")


def extract_witness(variant: str, inst: Instance, allocation: PartialAllocation) -> Witness:
    """Pull a source-problem solution back from a solution of a reduced instance.

    Partition variants return the weight positions of one half (agent 0's goods for two agents, agent 1's for three);
    ``equitable_coloring`` and ``rainbow_coloring`` return the color index of every vertex.

    The reduced instance must keep the names its reduction gave it: weight goods ``w1..wm``, vertex goods
    ``v:<vertex>``, color agents ``c1..ck`` and hyperedge agents ``e1..``.

    :param variant: A Partition variant, ``equitable_coloring`` or ``rainbow_coloring``.
    :param inst: The reduced instance.
    :param allocation: A complete allocation satisfying the variant's target property.
    :return: The source witness, validated.
    :raises AllocationError: If the allocation fails the target property or the pulled back witness is invalid.
    :raises ReductionError: If the variant is unknown or the instance does not carry the reduction's names.
    """
    if variant not in WITNESS_VARIANTS:
        raise ReductionError(f"Unknown variant: {variant!r}. Use one of {', '.join(WITNESS_VARIANTS)}.")
    _check_gadget_names(variant, inst)
    _require_property(variant, inst, allocation)
    if variant in PARTITION_VARIANTS:
        return _partition_witness(variant, inst, allocation)
    if variant == "equitable_coloring":
        return _equitable_witness(inst, allocation)
    return _rainbow_witness(inst, allocation)


def _check_gadget_names(variant: str, inst: Instance) -> None:
    if variant in PARTITION_VARIANTS:
        items = [good for good in inst.goods if good.startswith("w")]
        if not items or items != [f"w{k + 1}" for k in range(len(items))]:
            raise ReductionError("Partition gadgets name their weight goods w1, w2, ... in order.")
        return
    colors = [name for name in inst.agent_names or () if name.startswith("c")]
    if not colors or sorted(colors) != sorted(f"c{i + 1}" for i in range(len(colors))):
        raise ReductionError("Coloring gadgets name their color agents c1, c2, ... and need agent names.")
    if not any(good.startswith("v:") for good in inst.goods):
        raise ReductionError("Coloring gadgets name their vertex goods v:<vertex>.")


def _partition_witness(variant: str, inst: Instance, allocation: PartialAllocation) -> Tuple[int, ...]:
    items = [good for good in range(inst.m) if inst.goods[good].startswith("w")]
    weights = [inst.item_value(0, good) // (2 if variant == "mms_two_agent" else 1) for good in items]
    side = 0 if variant in ("two_agent_ef1", "two_agent_prop1", "mms_two_agent") else 1
    chosen = tuple(k for k, good in enumerate(items) if good in allocation.bundles[side])
    if 2 * sum(weights[k] for k in chosen) != sum(weights):
        raise AllocationError(f"Agent {side} holds weights summing to {sum(weights[k] for k in chosen)}, not half.")
    return chosen


def _vertex_goods(inst: Instance) -> List[int]:
    return [good for good in range(inst.m) if inst.goods[good].startswith("v:")]


def _color_agents(inst: Instance) -> Dict[int, int]:
    names = inst.agent_names or ()
    return {agent: int(name[1:]) - 1 for agent, name in enumerate(names) if name.startswith("c")}


def _coloring(inst: Instance, allocation: PartialAllocation) -> Coloring:
    colors = _color_agents(inst)
    coloring = {}
    for good in _vertex_goods(inst):
        owner = allocation.owner_of(good)
        if owner not in colors:
            raise AllocationError(f"Vertex good {inst.goods[good]!r} is not held by a color agent.")
        coloring[inst.goods[good][2:]] = colors[owner]
    return coloring


def _equitable_witness(inst: Instance, allocation: PartialAllocation) -> Coloring:
    coloring = _coloring(inst, allocation)
    names = inst.agent_names or ()
    vertex = {good: inst.goods[good][2:] for good in _vertex_goods(inst)}
    edges: List[Tuple[str, str]] = []
    for agent, name in enumerate(names):
        if name.startswith("e"):
            u, v = (vertex[good] for good in sorted(vertex) if inst.item_value(agent, good))
            edges.append((u, v))
    k = len(_color_agents(inst))
    if not is_equitable_coloring(list(vertex.values()), edges, k, coloring):
        raise AllocationError("The pulled back coloring is not an equitable proper coloring.")
    return coloring


def _rainbow_witness(inst: Instance, allocation: PartialAllocation) -> Coloring:
    coloring = _coloring(inst, allocation)
    names = inst.agent_names or ()
    rankings = inst.rankings or ()
    hyperedges = []
    for agent, name in enumerate(names):
        if name.startswith("e"):
            lead = itertools.takewhile(lambda good: inst.goods[good].startswith("v:"), rankings[agent])
            hyperedges.append([inst.goods[good][2:] for good in lead])
    if not is_rainbow_coloring(hyperedges, len(_color_agents(inst)), coloring):
        raise AllocationError("The pulled back coloring is not a rainbow coloring.")
    return coloring
