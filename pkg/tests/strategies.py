"""Hypothesis strategies shared by the test modules."""

from hypothesis import strategies as st

from fairino.model import Instance


@st.composite
def frozen_maps(draw, n: int, m: int):
    """A random frozen map for ``n`` agents and ``m`` goods."""
    cells = draw(st.lists(st.one_of(st.none(), st.integers(0, n - 1)), min_size=m, max_size=m))
    return {good: agent for good, agent in enumerate(cells) if agent is not None}


@st.composite
def additive_instances(draw, max_agents: int = 3, max_goods: int = 5, max_value: int = 4):
    """Additive instances with small values."""
    n = draw(st.integers(1, max_agents))
    m = draw(st.integers(0, max_goods))
    row = st.lists(st.integers(0, max_value), min_size=m, max_size=m)
    values = draw(st.lists(row, min_size=n, max_size=n))
    return Instance.from_values(values, goods=[f"g{j}" for j in range(m)], frozen=draw(frozen_maps(n, m)))


@st.composite
def binary_instances(draw, max_agents: int = 3, max_goods: int = 5):
    """Binary instances."""
    n = draw(st.integers(1, max_agents))
    m = draw(st.integers(0, max_goods))
    row = st.lists(st.integers(0, 1), min_size=m, max_size=m)
    values = draw(st.lists(row, min_size=n, max_size=n))
    return Instance.from_values(
        values, valuation_class="binary", goods=[f"g{j}" for j in range(m)], frozen=draw(frozen_maps(n, m))
    )


@st.composite
def lex_instances(draw, max_agents: int = 3, max_goods: int = 5):
    """Lexicographic instances."""
    n = draw(st.integers(1, max_agents))
    m = draw(st.integers(0, max_goods))
    rankings = [draw(st.permutations(list(range(m)))) for _ in range(n)]
    return Instance.from_rankings(rankings, goods=[f"g{j}" for j in range(m)], frozen=draw(frozen_maps(n, m)))


@st.composite
def completed(draw, instances):
    """An instance together with a random complete allocation extending its frozen allocation."""
    inst = draw(instances)
    bundles = [set(bundle) for bundle in inst.frozen_allocation().bundles]
    for good in inst.unallocated():
        bundles[draw(st.integers(0, inst.n_agents - 1))].add(good)
    return inst, bundles
