import pytest
from hypothesis import HealthCheck, settings, strategies as st

import grues.reduction
from grues.graph import Dag, UndirectedGraph, pair_list, udg

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def lattice_checks(monkeypatch):
    """Validate the lattice form after every reduction move."""
    monkeypatch.setattr(grues.reduction, "DEBUG", True)


@st.composite
def dags(draw, min_n=1, max_n=7):
    n = draw(st.integers(min_n, max_n))
    order = draw(st.permutations(range(n)))
    pairs = [(order[i], order[j]) for i in range(n) for j in range(i + 1, n)]
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Dag.from_edges(n, [p for p, k in zip(pairs, keep) if k])


@st.composite
def undirected_graphs(draw, min_n=1, max_n=7):
    n = draw(st.integers(min_n, max_n))
    pairs = pair_list(n)
    mask = draw(st.integers(0, (1 << len(pairs)) - 1))
    return UndirectedGraph.from_mask(n, mask)


@st.composite
def uec_graphs(draw, min_n=1, max_n=7):
    # every UEC-representative is the dependence graph of some DAG
    return udg(draw(dags(min_n, max_n)))
