"""Module for type definitions."""

from typing import Dict, FrozenSet, Iterable, List, Literal, NamedTuple, Optional, Tuple


ValuationClass = Literal["binary", "lexicographic", "additive"]
Status = Literal["witness", "none_exists", "not_applicable"]
Property = Literal["ef", "ef1", "prop", "prop1", "mms", "alpha_mms", "po", "mnw", "sequencible"]

VALUATION_CLASSES: Tuple[ValuationClass, ...] = ("binary", "lexicographic", "additive")


class InstanceError(ValueError):
    """Raised when an instance or allocation is malformed or violates its invariants."""


class WrongClassError(ValueError):
    """Raised when an operation is called on an instance of an unsupported valuation class."""


class AllocationError(ValueError):
    """Raised when an allocation does not meet the requirements of an operation."""


class ReductionError(ValueError):
    """Raised when the source instance of a reduction or counterexample family is invalid."""


class BudgetExceededError(RuntimeError):
    """Raised when an exhaustive search would exceed its configured budget."""


class Budgets(NamedTuple):
    """NamedTuple holding the limits of the exhaustive searches.

    :param enumeration: Maximum number of completions enumerated by the oracle.
    :param pareto: Maximum number of complete allocations inspected by the Pareto optimality oracle.
    :param mms: Maximum number of completions inspected by the brute force maximin share computation.
    """

    enumeration: int = 10**7
    pareto: int = 10**7
    mms: int = 10**7

    @classmethod
    def uniform(cls, budget: int) -> "Budgets":
        """Alternative constructor using the same limit for every search.

        :param budget: The limit, a positive integer.
        :return: Budgets named tuple.
        :raises ValueError: If the budget is not positive.
        """
        if budget < 1:
            raise ValueError(f"Invalid budget: {budget}")
        return cls(budget, budget, budget)


class PartialAllocation(NamedTuple):
    """NamedTuple representing a (partial) allocation: one bundle of good indices per agent.

    A completion is represented by the same type; its bundles cover exactly the unallocated goods.

    :param bundles: One frozenset of good indices per agent.
    """

    bundles: Tuple[FrozenSet[int], ...]

    @classmethod
    def empty(cls, n_agents: int) -> "PartialAllocation":
        """Alternative constructor for the allocation where every bundle is empty.

        :param n_agents: Number of agents.
        :return: PartialAllocation named tuple.
        """
        return cls(tuple(frozenset() for _ in range(n_agents)))

    @classmethod
    def from_bundles(cls, bundles: Iterable[Iterable[int]]) -> "PartialAllocation":
        """Alternative constructor from any iterable of bundles.

        :param bundles: One iterable of good indices per agent.
        :return: PartialAllocation named tuple.
        :raises InstanceError: If two bundles share a good.
        """
        allocation = cls(tuple(frozenset(bundle) for bundle in bundles))
        seen: Dict[int, int] = {}
        for agent, bundle in enumerate(allocation.bundles):
            for good in bundle:
                if good in seen:
                    raise InstanceError(f"Good {good} is assigned to agents {seen[good]} and {agent}.")
                seen[good] = agent
        return allocation

    @classmethod
    def from_assignment(cls, n_agents: int, assignment: Dict[int, int]) -> "PartialAllocation":
        """Alternative constructor from a good -> agent mapping.

        :param n_agents: Number of agents.
        :param assignment: Mapping from good index to agent index.
        :return: PartialAllocation named tuple.
        """
        bundles: List[List[int]] = [[] for _ in range(n_agents)]
        for good, agent in assignment.items():
            bundles[agent].append(good)
        return cls(tuple(frozenset(bundle) for bundle in bundles))

    @property
    def n_agents(self) -> int:
        """The number of bundles."""
        return len(self.bundles)

    @property
    def allocated(self) -> FrozenSet[int]:
        """The union of all bundles."""
        return frozenset().union(*self.bundles)

    def is_complete(self, m: int) -> bool:
        """Whether the bundles cover the goods ``0..m-1`` exactly.

        :param m: Number of goods.
        """
        return self.allocated == frozenset(range(m)) and sum(len(bundle) for bundle in self.bundles) == m

    def owner_of(self, good: int) -> Optional[int]:
        """The agent holding a good, or None if the good is not allocated.

        :param good: Index of the good.
        """
        return next((agent for agent, bundle in enumerate(self.bundles) if good in bundle), None)

    def assignment(self) -> Dict[int, int]:
        """The good -> agent mapping of the allocation."""
        return {good: agent for agent, bundle in enumerate(self.bundles) for good in bundle}

    def with_good(self, agent: int, good: int) -> "PartialAllocation":
        """A copy of the allocation where ``agent`` additionally holds ``good``.

        :param agent: Index of the receiving agent.
        :param good: Index of the good.
        """
        bundles = list(self.bundles)
        bundles[agent] = bundles[agent] | {good}
        return PartialAllocation(tuple(bundles))

    def sorted_bundles(self) -> List[List[int]]:
        """The bundles as sorted lists, for stable output."""
        return [sorted(bundle) for bundle in self.bundles]


Completion = PartialAllocation


class Violation(NamedTuple):
    """NamedTuple representing a single failure of a fairness or efficiency property.

    :param agent: The agent for whom the property fails.
    :param counterpart: The other agent involved, if any.
    :param explanation: Human readable explanation.
    """

    agent: int
    counterpart: Optional[int]
    explanation: str


class FairnessReport(NamedTuple):
    """NamedTuple representing the verdict of a property checker.

    :param property: Name of the checked property.
    :param holds: Whether the property holds; true exactly when there are no violations.
    :param violations: Violations sorted by agent, then counterpart.
    """

    property: str
    holds: bool
    violations: Tuple[Violation, ...] = ()

    @classmethod
    def from_violations(cls, prop: str, violations: Iterable[Violation]) -> "FairnessReport":
        """Alternative constructor that sorts the violations and derives ``holds``.

        :param prop: Name of the checked property.
        :param violations: The violations found.
        :return: FairnessReport named tuple.
        """
        ordered = tuple(
            sorted(violations, key=lambda v: (v.agent, -1 if v.counterpart is None else v.counterpart, v.explanation))
        )
        return cls(prop, not ordered, ordered)

    def to_dict(self) -> dict:
        """JSON-ready representation of the report."""
        return {
            "property": self.property,
            "holds": self.holds,
            "violations": [
                {"agent": v.agent, "counterpart": v.counterpart, "explanation": v.explanation} for v in self.violations
            ],
        }


class EnvyGraph(NamedTuple):
    """NamedTuple representing the envy graph of a partial allocation.

    :param n_agents: Number of agents (the nodes are ``0..n_agents-1``).
    :param edges: Pairs ``(i, j)`` such that agent ``i`` strictly envies agent ``j``.
    :param acyclic: Whether the graph has no directed cycle.
    :param order: A topological order (lowest index first on ties) when the graph is acyclic.
    """

    n_agents: int
    edges: Tuple[Tuple[int, int], ...]
    acyclic: bool
    order: Optional[Tuple[int, ...]] = None


class MmsValue(NamedTuple):
    """NamedTuple holding the maximin share of one agent.

    :param mu: The maximin share value.
    :param witness: An allocation completing the frozen allocation whose least valued bundle is worth ``mu``.
    """

    mu: int
    witness: Optional[PartialAllocation] = None


class MmsResult(NamedTuple):
    """NamedTuple holding the maximin shares of all agents.

    :param mu: One maximin share value per agent.
    :param witnesses: One maximin share partition per agent.
    """

    mu: Tuple[int, ...]
    witnesses: Tuple[Optional[PartialAllocation], ...]


class SolveOutcome(NamedTuple):
    """NamedTuple representing the answer of a completion solver.

    :param status: ``witness``, ``none_exists`` or ``not_applicable``.
    :param witness: The complete allocation found, when ``status`` is ``witness``.
    :param note: Free text naming the algorithm used, or why it did not apply.
    """

    status: Status
    witness: Optional[PartialAllocation] = None
    note: str = ""

    @classmethod
    def found(cls, witness: PartialAllocation, note: str) -> "SolveOutcome":
        """Alternative constructor for a successful solve."""
        return cls("witness", witness, note)

    @classmethod
    def none_exists(cls, note: str) -> "SolveOutcome":
        """Alternative constructor for a certified negative answer."""
        return cls("none_exists", None, note)

    @classmethod
    def not_applicable(cls, note: str) -> "SolveOutcome":
        """Alternative constructor for a solver whose preconditions do not hold."""
        return cls("not_applicable", None, note)


class Mismatch(NamedTuple):
    """NamedTuple representing a disagreement between a solver and the exhaustive oracle.

    :param case: Index of the case in the sweep.
    :param instance: The instance, in the instance file format.
    :param solver: Status returned by the solver.
    :param oracle: Status returned by the oracle.
    :param note: What went wrong.
    """

    case: int
    instance: dict
    solver: str
    oracle: str
    note: str = ""

    def to_dict(self) -> dict:
        """JSON-ready representation of the mismatch."""
        return self._asdict()
