"""Module for the graph kernels: flows with lower quotas and bipartite matchings."""

import logging
from typing import Dict, Hashable, List, NamedTuple, Optional, Tuple

import networkx as nx


logger = logging.getLogger(__name__)

Node = Hashable
Flow = Dict[Tuple[Node, Node], int]

_SUPER_SOURCE = ("circulation", "source")
_SUPER_SINK = ("circulation", "sink")
_RETURN = ("circulation", "return")


class Arc(NamedTuple):
    """NamedTuple representing an arc of a quota network.

    :param tail: Start node.
    :param head: End node.
    :param capacity: Integral capacity, None when unbounded.
    :param lower: Lower quota, the least flow the arc must carry.
    """

    tail: Node
    head: Node
    capacity: Optional[int] = None
    lower: int = 0


class QuotaNetwork(NamedTuple):
    """NamedTuple representing a flow network whose arcs carry capacities and lower quotas.

    :param source: The source node.
    :param sink: The sink node.
    :param arcs: The arcs; at most one arc per ordered pair of nodes.
    """

    source: Node
    sink: Node
    arcs: Tuple[Arc, ...]

    def validate(self) -> None:
        """Check that quotas are non-negative, fit their capacities and arcs are unique.

        :raises ValueError: If the network is invalid.
        """
        if self.source == self.sink:
            raise ValueError("Source and sink must differ.")
        seen = set()
        for arc in self.arcs:
            if (arc.tail, arc.head) in seen:
                raise ValueError(f"Duplicate arc {arc.tail!r} -> {arc.head!r}.")
            seen.add((arc.tail, arc.head))
            if arc.tail == arc.head:
                raise ValueError(f"Self loop on {arc.tail!r}.")
            if arc.lower < 0 or (arc.capacity is not None and not 0 <= arc.lower <= arc.capacity):
                raise ValueError(f"Arc {arc.tail!r} -> {arc.head!r}: quota {arc.lower}, capacity {arc.capacity}.")

    @property
    def unbounded(self) -> int:
        """A finite stand-in for unbounded capacities: the sum of all quotas and finite capacities."""
        return sum(arc.lower for arc in self.arcs) + sum(arc.capacity for arc in self.arcs if arc.capacity is not None)


class BipartiteGraph(NamedTuple):
    """NamedTuple representing a bipartite graph.

    :param left: Left nodes (agents).
    :param right: Right nodes (goods).
    :param edges: Pairs ``(left, right)``.
    """

    left: Tuple[Node, ...]
    right: Tuple[Node, ...]
    edges: Tuple[Tuple[Node, Node], ...]


def feasible_flow_with_quotas(net: QuotaNetwork) -> Optional[Flow]:
    """Find an integral source-sink flow meeting every lower quota and capacity.

    The quotas are moved into node demands served by a super source and sink, a return arc from the sink to the
    source turns the flow into a circulation, and a plain maximum flow decides feasibility.

    :param net: The network.
    :return: The flow on every arc, or None if no feasible flow exists.
    :raises ValueError: If the network is invalid.
    """
    net.validate()
    unbounded = net.unbounded
    graph = nx.DiGraph()
    graph.add_nodes_from([_SUPER_SOURCE, _SUPER_SINK, net.source, net.sink])
    excess: Dict[Node, int] = {}
    for arc in net.arcs:
        capacity = unbounded if arc.capacity is None else arc.capacity
        graph.add_edge(arc.tail, arc.head, capacity=capacity - arc.lower)
        excess[arc.head] = excess.get(arc.head, 0) + arc.lower
        excess[arc.tail] = excess.get(arc.tail, 0) - arc.lower
    graph.add_edge(net.sink, _RETURN, capacity=unbounded)
    graph.add_edge(_RETURN, net.source, capacity=unbounded)

    demand = 0
    for node, amount in excess.items():
        if amount > 0:
            graph.add_edge(_SUPER_SOURCE, node, capacity=amount)
            demand += amount
        elif amount < 0:
            graph.add_edge(node, _SUPER_SINK, capacity=-amount)

    value, flow = nx.maximum_flow(graph, _SUPER_SOURCE, _SUPER_SINK)
    logger.debug("Circulation carries %s of %s quota units", value, demand)
    if value < demand:
        return None
    return {(arc.tail, arc.head): arc.lower + flow[arc.tail][arc.head] for arc in net.arcs}


def matching_covering_left(graph: BipartiteGraph) -> Optional[Dict[Node, Node]]:
    """Find a matching that covers every left node.

    :param graph: The bipartite graph.
    :return: Mapping from each left node to its matched right node, or None if no such matching exists.
    """
    if not graph.left:
        return {}
    g = nx.Graph()
    top = [("left", node) for node in graph.left]
    g.add_nodes_from(top)
    g.add_nodes_from(("right", node) for node in graph.right)
    g.add_edges_from((("left", u), ("right", v)) for u, v in graph.edges)
    matching = nx.bipartite.hopcroft_karp_matching(g, top_nodes=top)
    covered = {u[1]: matching[u][1] for u in top if u in matching}
    if len(covered) < len(graph.left):
        logger.debug("Maximum matching covers %s of %s left nodes", len(covered), len(graph.left))
        return None
    return covered


def describe_network(net: QuotaNetwork) -> List[str]:
    """One line per arc: ``tail -> head [lower, capacity]``."""
    return [
        f"{arc.tail} -> {arc.head} [{arc.lower}, {'inf' if arc.capacity is None else arc.capacity}]" for arc in net.arcs
    ]
