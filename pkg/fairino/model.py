"""Module for the core data model: instances, allocations, parsing and bundle values."""

import json
import logging
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple

from .type_definitions import (
    VALUATION_CLASSES,
    InstanceError,
    PartialAllocation,
    ValuationClass,
    WrongClassError,
)


logger = logging.getLogger(__name__)

LEX_BASE = 2
CLASS_ALIASES: Dict[str, ValuationClass] = {
    "binary": "binary",
    "lexicographic": "lexicographic",
    "additive": "additive",
    "general_additive": "additive",
}


def lex_values(ranking: Sequence[int], m: int) -> Tuple[int, ...]:
    """Cardinal values of a strict ranking: the good at (1-based) rank ``r`` is worth ``LEX_BASE ** (m - r)``.

    :param ranking: Good indices, most preferred first.
    :param m: Number of goods.
    :return: One value per good index.
    """
    values = [0] * m
    for position, good in enumerate(ranking):
        values[good] = LEX_BASE ** (m - 1 - position)
    return tuple(values)


class Instance(NamedTuple):
    """NamedTuple representing an allocation completion instance.

    Lexicographic instances keep their rankings and carry the realized values ``LEX_BASE ** (m - rank)``, so every
    value based operation works on all three classes.

    :param n_agents: Number of agents, at least one.
    :param goods: Good identifiers; good ``g`` is ``goods[g]``.
    :param valuation_class: ``binary``, ``lexicographic`` or ``additive``.
    :param values: One tuple of item values per agent.
    :param frozen: Per good, the agent it is frozen to, or None when the good is unallocated.
    :param rankings: Per agent, good indices from most to least preferred (lexicographic class only).
    :param agent_names: Optional display names of the agents.
    """

    n_agents: int
    goods: Tuple[str, ...]
    valuation_class: ValuationClass
    values: Tuple[Tuple[int, ...], ...]
    frozen: Tuple[Optional[int], ...]
    rankings: Optional[Tuple[Tuple[int, ...], ...]] = None
    agent_names: Optional[Tuple[str, ...]] = None

    @classmethod
    def from_values(
        cls,
        values: Sequence[Sequence[int]],
        *,
        valuation_class: ValuationClass = "additive",
        goods: Optional[Sequence[str]] = None,
        frozen: Optional[Mapping[int, int]] = None,
        agent_names: Optional[Sequence[str]] = None,
    ) -> "Instance":
        """Alternative constructor for binary and additive instances.

        :param values: One row of item values per agent.
        :param valuation_class: ``binary`` or ``additive``.
        :param goods: Good identifiers, defaults to ``g0, g1, ...``.
        :param frozen: Mapping from good index to agent index.
        :param agent_names: Optional display names of the agents.
        :return: Validated Instance.
        :raises InstanceError: If any invariant is violated.
        """
        if valuation_class not in ("binary", "additive"):
            raise InstanceError(f"Use `from_rankings` for class {valuation_class!r}.")
        if not values:
            raise InstanceError("An instance needs at least one agent.")
        m = len(values[0]) if goods is None else len(goods)
        inst = cls(
            n_agents=len(values),
            goods=_goods_or_default(goods, m),
            valuation_class=valuation_class,
            values=tuple(tuple(row) for row in values),
            frozen=_frozen_tuple(frozen or {}, m),
            agent_names=tuple(agent_names) if agent_names is not None else None,
        )
        inst.validate()
        return inst

    @classmethod
    def from_rankings(
        cls,
        rankings: Sequence[Sequence[int]],
        *,
        goods: Optional[Sequence[str]] = None,
        frozen: Optional[Mapping[int, int]] = None,
        agent_names: Optional[Sequence[str]] = None,
    ) -> "Instance":
        """Alternative constructor for lexicographic instances.

        :param rankings: Per agent, good indices from most to least preferred.
        :param goods: Good identifiers, defaults to ``g0, g1, ...``.
        :param frozen: Mapping from good index to agent index.
        :param agent_names: Optional display names of the agents.
        :return: Validated Instance.
        :raises InstanceError: If a ranking is not a permutation of the goods.
        """
        if not rankings:
            raise InstanceError("An instance needs at least one agent.")
        m = len(rankings[0]) if goods is None else len(goods)
        for agent, ranking in enumerate(rankings):
            if sorted(ranking) != list(range(m)):
                raise InstanceError(f"Ranking of agent {agent} is not a permutation of the goods.")
        inst = cls(
            n_agents=len(rankings),
            goods=_goods_or_default(goods, m),
            valuation_class="lexicographic",
            values=tuple(lex_values(ranking, m) for ranking in rankings),
            frozen=_frozen_tuple(frozen or {}, m),
            rankings=tuple(tuple(ranking) for ranking in rankings),
            agent_names=tuple(agent_names) if agent_names is not None else None,
        )
        inst.validate()
        return inst

    def validate(self) -> None:
        """Check every invariant of the instance.

        :raises InstanceError: If an invariant is violated.
        """
        if self.n_agents < 1:
            raise InstanceError("An instance needs at least one agent.")
        if self.valuation_class not in VALUATION_CLASSES:
            raise InstanceError(f"Unknown valuation class: {self.valuation_class!r}.")
        if len(set(self.goods)) != len(self.goods):
            raise InstanceError("Good identifiers must be unique.")
        if len(self.values) != self.n_agents:
            raise InstanceError(f"Expected {self.n_agents} valuation rows, got {len(self.values)}.")
        for agent, row in enumerate(self.values):
            if len(row) != self.m:
                raise InstanceError(f"Valuation row of agent {agent} has {len(row)} entries, expected {self.m}.")
            for value in row:
                if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                    raise InstanceError(f"Value {value!r} out of range for {self.valuation_class} class.")
                if self.valuation_class == "binary" and value > 1:
                    raise InstanceError(f"Value {value} out of range for binary class.")
        if len(self.frozen) != self.m:
            raise InstanceError("The frozen map must have one entry per good.")
        for good, agent in enumerate(self.frozen):
            if agent is not None and not 0 <= agent < self.n_agents:
                raise InstanceError(f"Good {self.goods[good]!r} is frozen to unknown agent {agent}.")
        if self.agent_names is not None:
            if not all(isinstance(name, str) for name in self.agent_names):
                raise InstanceError("`agent_names` must be strings.")
            if len(self.agent_names) != self.n_agents:
                raise InstanceError("`agent_names` must name every agent.")

    @property
    def m(self) -> int:
        """The number of goods."""
        return len(self.goods)

    @property
    def agents(self) -> range:
        """The agent indices."""
        return range(self.n_agents)

    def unallocated(self) -> Tuple[int, ...]:
        """The unallocated goods, in index order."""
        return tuple(good for good, agent in enumerate(self.frozen) if agent is None)

    def frozen_allocation(self) -> PartialAllocation:
        """The frozen allocation as a PartialAllocation."""
        return PartialAllocation.from_assignment(
            self.n_agents, {good: agent for good, agent in enumerate(self.frozen) if agent is not None}
        )

    def item_value(self, agent: int, good: int) -> int:
        """The value of a single good for an agent."""
        return self.values[agent][good]

    def value_of(self, agent: int, bundle: Iterable[int]) -> int:
        """The additive value of a bundle for an agent."""
        row = self.values[agent]
        return sum(row[good] for good in bundle)

    def total_value(self, agent: int) -> int:
        """The value of all goods for an agent."""
        return sum(self.values[agent])

    def is_identical(self) -> bool:
        """Whether all agents share the same value vector."""
        return all(row == self.values[0] for row in self.values)

    def with_frozen(self, frozen: Mapping[int, int]) -> "Instance":
        """A copy of the instance with a different frozen map.

        :param frozen: Mapping from good index to agent index.
        """
        inst = self._replace(frozen=_frozen_tuple(frozen, self.m))
        inst.validate()
        return inst

    def order_by_value(self, agent: int, goods: Iterable[int]) -> List[int]:
        """Goods sorted from most to least valuable for an agent, lowest index first on ties."""
        row = self.values[agent]
        return sorted(goods, key=lambda good: (-row[good], good))

    def has_strict_values(self, agent: int, goods: Iterable[int]) -> bool:
        """Whether an agent values the given goods pairwise differently."""
        seen = [self.values[agent][good] for good in goods]
        return len(seen) == len(set(seen))

    def good_index(self, name: str) -> int:
        """Index of a good from its identifier.

        :raises InstanceError: If the good is unknown.
        """
        try:
            return self.goods.index(name)
        except ValueError as exc:
            raise InstanceError(f"Unknown good: {name!r}.") from exc

    def agent_name(self, agent: int) -> str:
        """Display name of an agent, ``1..n`` unless names are given."""
        return self.agent_names[agent] if self.agent_names is not None else str(agent + 1)


def _goods_or_default(goods: Optional[Sequence[str]], m: int) -> Tuple[str, ...]:
    return tuple(goods) if goods is not None else tuple(f"g{good}" for good in range(m))


def _frozen_tuple(frozen: Mapping[int, int], m: int) -> Tuple[Optional[int], ...]:
    cells: List[Optional[int]] = [None] * m
    for good, agent in frozen.items():
        if not 0 <= good < m:
            raise InstanceError(f"Frozen good {good} does not exist.")
        cells[good] = agent
    return tuple(cells)


def _reject_duplicate_keys(pairs: List[Tuple[str, Any]]) -> Dict[str, Any]:
    result: Dict[str, Any] = {}
    for key, value in pairs:
        if key in result:
            raise InstanceError(f"Duplicate key {key!r}; a good may be frozen to one agent only.")
        result[key] = value
    return result


def _load_json(text: str) -> Dict[str, Any]:
    try:
        data = json.loads(text, object_pairs_hook=_reject_duplicate_keys)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"Malformed JSON: {exc.msg} (line {exc.lineno}, column {exc.colno}).") from exc
    if not isinstance(data, dict):
        raise InstanceError("The file must contain a JSON object.")
    return data


def parse_instance(text: str) -> Instance:
    """Parse an instance file.

    :param text: UTF-8 JSON text with the keys ``agents``, ``goods``, ``class``, ``valuations`` or ``rankings``,
        ``frozen`` and optionally ``agent_names``.
    :return: Validated Instance.
    :raises InstanceError: If the text is malformed or the instance violates an invariant.
    """
    data = _load_json(text)
    for key in ("agents", "goods", "class"):
        if key not in data:
            raise InstanceError(f"Missing key: {key!r}.")
    n_agents, goods = data["agents"], data["goods"]
    if not isinstance(n_agents, int) or isinstance(n_agents, bool) or n_agents < 1:
        raise InstanceError(f"Invalid number of agents: {n_agents!r}.")
    if not isinstance(goods, list) or not all(isinstance(good, str) for good in goods):
        raise InstanceError("`goods` must be a list of strings.")
    if len(set(goods)) != len(goods):
        raise InstanceError("Good identifiers must be unique.")
    valuation_class = CLASS_ALIASES.get(data["class"])
    if valuation_class is None:
        raise InstanceError(f"Unknown valuation class: {data['class']!r}.")

    index = {good: position for position, good in enumerate(goods)}
    raw_frozen = data.get("frozen", {})
    if not isinstance(raw_frozen, dict):
        raise InstanceError("`frozen` must map good identifiers to agent indices.")
    frozen: Dict[int, int] = {}
    for good, agent in raw_frozen.items():
        if good not in index:
            raise InstanceError(f"Unknown frozen good: {good!r}.")
        if not isinstance(agent, int) or isinstance(agent, bool) or not 0 <= agent < n_agents:
            raise InstanceError(f"Good {good!r} is frozen to unknown agent {agent!r}.")
        frozen[index[good]] = agent

    agent_names = data.get("agent_names")
    if agent_names is not None and (
        not isinstance(agent_names, list) or not all(isinstance(name, str) for name in agent_names)
    ):
        raise InstanceError("`agent_names` must be a list of strings.")
    if valuation_class == "lexicographic":
        rankings = data.get("rankings")
        if not isinstance(rankings, list) or len(rankings) != n_agents:
            raise InstanceError(f"Expected {n_agents} rankings.")
        ranked: List[List[int]] = []
        for agent, ranking in enumerate(rankings):
            if (
                not isinstance(ranking, list)
                or not all(isinstance(good, str) for good in ranking)
                or sorted(ranking) != sorted(goods)
            ):
                raise InstanceError(f"Ranking of agent {agent} is not a permutation of the goods.")
            ranked.append([index[good] for good in ranking])
        inst = Instance.from_rankings(ranked, goods=goods, frozen=frozen, agent_names=agent_names)
    else:
        valuations = data.get("valuations")
        if not isinstance(valuations, list) or len(valuations) != n_agents:
            raise InstanceError(f"Expected {n_agents} valuation rows.")
        if not all(isinstance(row, list) for row in valuations):
            raise InstanceError("Each valuation row must be a list of integers.")
        inst = Instance.from_values(
            valuations, valuation_class=valuation_class, goods=goods, frozen=frozen, agent_names=agent_names
        )

    logger.debug("Parsed %s instance with %s agents and %s goods", inst.valuation_class, inst.n_agents, inst.m)
    return inst


def instance_to_dict(inst: Instance) -> Dict[str, Any]:
    """JSON-ready representation of an instance, in the key order of the file format."""
    data: Dict[str, Any] = {"agents": inst.n_agents, "goods": list(inst.goods), "class": inst.valuation_class}
    if inst.valuation_class == "lexicographic" and inst.rankings is not None:
        data["rankings"] = [[inst.goods[good] for good in ranking] for ranking in inst.rankings]
    else:
        data["valuations"] = [list(row) for row in inst.values]
    data["frozen"] = {inst.goods[good]: agent for good, agent in enumerate(inst.frozen) if agent is not None}
    if inst.agent_names is not None:
        data["agent_names"] = list(inst.agent_names)
    return data


def serialize_instance(inst: Instance) -> str:
    """Serialize an instance to the instance file format.

    :param inst: The instance.
    :return: JSON text that :func:`parse_instance` turns back into an identical Instance.
    """
    return json.dumps(instance_to_dict(inst), indent=2)


def parse_allocation(inst: Instance, text: str) -> PartialAllocation:
    """Parse an allocation file ``{"bundles": [[good, ...], ...]}``.

    :param inst: The instance the allocation refers to.
    :param text: JSON text.
    :return: PartialAllocation over good indices.
    :raises InstanceError: If the bundles are malformed, name unknown goods or overlap.
    """
    data = _load_json(text)
    bundles = data.get("bundles")
    if not isinstance(bundles, list) or not all(isinstance(bundle, list) for bundle in bundles):
        raise InstanceError("`bundles` must be a list of lists of good identifiers.")
    if len(bundles) != inst.n_agents:
        raise InstanceError(f"Expected {inst.n_agents} bundles, got {len(bundles)}.")
    indexed: List[List[int]] = []
    for bundle in bundles:
        goods = [inst.good_index(good) for good in bundle]
        if len(set(goods)) != len(goods):
            raise InstanceError("A bundle lists the same good twice.")
        indexed.append(goods)
    return PartialAllocation.from_bundles(indexed)


def allocation_to_dict(inst: Instance, allocation: PartialAllocation) -> Dict[str, Any]:
    """JSON-ready representation of an allocation, goods in index order."""
    return {"bundles": [[inst.goods[good] for good in bundle] for bundle in allocation.sorted_bundles()]}


def serialize_allocation(inst: Instance, allocation: PartialAllocation) -> str:
    """Serialize an allocation to the allocation file format."""
    return json.dumps(allocation_to_dict(inst, allocation))


def value_of_bundle(inst: Instance, agent: int, bundle: Iterable[int]) -> int:
    """The value of a bundle for an agent.

    For lexicographic instances this is the sum of ``LEX_BASE ** (m - rank)`` over the bundle.

    :param inst: The instance.
    :param agent: Index of the agent.
    :param bundle: Good indices.
    :return: The exact integer value.
    """
    return inst.value_of(agent, bundle)


def lex_cardinal_realization(inst: Instance) -> Instance:
    """Convert a lexicographic instance into the additive instance with values ``LEX_BASE ** (m - rank)``.

    :param inst: A lexicographic instance.
    :return: An additive instance ordering bundles exactly like the rankings do.
    :raises WrongClassError: If the instance is not lexicographic.
    """
    if inst.valuation_class != "lexicographic":
        raise WrongClassError(f"Expected a lexicographic instance, got {inst.valuation_class}.")
    return inst._replace(valuation_class="additive", rankings=None)


def lex_prefers(ranking: Sequence[int], first: Iterable[int], second: Iterable[int]) -> bool:
    """Whether a lexicographic agent strictly prefers one bundle over another.

    The agent compares the most preferred good in which the bundles differ.

    :param ranking: Good indices, most preferred first.
    :param first: The first bundle.
    :param second: The second bundle.
    """
    first_set, second_set = frozenset(first), frozenset(second)
    for good in ranking:
        if (good in first_set) != (good in second_set):
            return good in first_set
    return False


def merge_allocation(
    frozen: PartialAllocation, completion: PartialAllocation, *, m: Optional[int] = None
) -> PartialAllocation:
    """Merge a completion into a frozen allocation bundle by bundle.

    :param frozen: The frozen allocation.
    :param completion: An allocation of the unallocated goods.
    :param m: Number of goods; when given the result must be complete.
    :return: The allocation with bundles ``F_i | C_i``.
    :raises InstanceError: If the completion overlaps the frozen goods or leaves a good uncovered.
    """
    if frozen.n_agents != completion.n_agents:
        raise InstanceError("Frozen allocation and completion have different numbers of bundles.")
    overlap: FrozenSet[int] = frozen.allocated & completion.allocated
    if overlap:
        raise InstanceError(f"The completion assigns frozen goods {sorted(overlap)}.")
    merged = PartialAllocation.from_bundles(f | c for f, c in zip(frozen.bundles, completion.bundles))
    if m is not None and not merged.is_complete(m):
        missing = sorted(set(range(m)) - merged.allocated)
        raise InstanceError(f"The completion leaves goods {missing} unallocated.")
    return merged


def complete_with(inst: Instance, completion: PartialAllocation) -> PartialAllocation:
    """Merge a completion into the frozen allocation of an instance and check it covers every good."""
    return merge_allocation(inst.frozen_allocation(), completion, m=inst.m)
