import itertools
from math import comb

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from grues.graph import Dag, UndirectedGraph, pair_list, udg
from grues.uec import (
    MonomialRep,
    NotUECError,
    all_monomial_reps,
    enumerate_uec_representatives,
    id_to_graph,
    independence_number,
    intersection_number,
    is_uec_representative,
    maximal_cliques,
    maximum_independent_set,
    min_edge_clique_cover,
    minimal_covers,
    monomial_rep,
    sufficient_statistic,
    uec_id,
)

from conftest import uec_graphs, undirected_graphs
from helpers import alpha_oracle, delta_oracle, nx_graph

# worked examples, shifted to 0-indexed vertices
TWO_CLIQUES = UndirectedGraph.from_cliques(4, [{0, 2, 3}, {1, 2, 3}])
BRIDGED = UndirectedGraph.from_cliques(6, [{0, 1, 2}, {2, 3}, {3, 4, 5}])
OCTAGON = UndirectedGraph.from_cliques(8, [{0, 1, 2}, {2, 3, 4}, {4, 5, 6}, {6, 7, 0}, {0, 2, 6}])


def test_two_clique_example():
    assert independence_number(TWO_CLIQUES) == 2
    assert intersection_number(TWO_CLIQUES) == 2
    assert is_uec_representative(TWO_CLIQUES)
    cover = min_edge_clique_cover(TWO_CLIQUES)
    assert set(cover.cliques) == {frozenset({0, 2, 3}), frozenset({1, 2, 3})}
    assert cover.centers == (0, 1)


def test_bridged_triangles_rejected():
    assert independence_number(BRIDGED) == 2
    assert intersection_number(BRIDGED) == 3
    assert not is_uec_representative(BRIDGED)
    with pytest.raises(NotUECError) as info:
        min_edge_clique_cover(BRIDGED)
    assert (info.value.alpha, info.value.delta) == (2, 3)
    assert sorted(maximum_independent_set(BRIDGED)) in ([0, 3], [0, 4], [0, 5], [1, 3], [1, 4], [1, 5])


def test_octagon_rejected():
    assert independence_number(OCTAGON) == 4
    assert intersection_number(OCTAGON) == 5
    assert not is_uec_representative(OCTAGON)


def test_isolated_vertices_count_as_cliques():
    g = UndirectedGraph.empty(3)
    assert intersection_number(g) == 3 == independence_number(g)
    assert is_uec_representative(g)
    assert is_uec_representative(UndirectedGraph.empty(0))


def test_table_counts_small():
    assert [len(enumerate_uec_representatives(n)) for n in range(1, 6)] == [1, 2, 8, 49, 462]


def test_enumeration_limit():
    with pytest.raises(ValueError):
        enumerate_uec_representatives(7)


def test_enumeration_matches_brute_force_n4():
    brute = [UndirectedGraph.from_mask(4, m) for m in range(1 << 6)]
    brute = [g for g in brute if alpha_oracle(g) == delta_oracle(g)]
    assert enumerate_uec_representatives(4) == sorted(brute, key=lambda g: g.mask)


def test_minimal_covers_have_private_elements():
    for cover in minimal_covers(4):
        union = 0
        for s in cover:
            union |= s
        assert union == 0b1111
        for k, s in enumerate(cover):
            rest = 0
            for j, t in enumerate(cover):
                if j != k:
                    rest |= t
            assert s & ~rest


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_enumeration_equals_dependence_graphs_of_all_dags(n):
    # every DAG on n vertices, up to relabeling via all orders and edge subsets
    seen = set()
    pairs = list(itertools.combinations(range(n), 2))
    if n <= 4:
        for order in itertools.permutations(range(n)):
            for mask in range(1 << len(pairs)):
                edges = [(order[a], order[b]) for k, (a, b) in enumerate(pairs) if mask >> k & 1]
                seen.add(udg(Dag.from_edges(n, edges)).mask)
        assert sorted(seen) == [g.mask for g in enumerate_uec_representatives(n)]
    else:
        assert all(is_uec_representative(g) for g in enumerate_uec_representatives(n))


def test_uec_id_bit_order():
    # pairs (0,1), (0,2), (1,2) take bits 0, 1, 2
    assert uec_id(UndirectedGraph.from_edges(3, [(0, 2)])) == "2"
    assert uec_id(UndirectedGraph.complete(3)) == "7"
    assert uec_id(UndirectedGraph.empty(5)) == "000"
    assert len(uec_id(UndirectedGraph.empty(6))) == 4


@given(undirected_graphs(max_n=6))
def test_recognition_matches_oracle(g):
    assert is_uec_representative(g) == (alpha_oracle(g) == delta_oracle(g))


@given(undirected_graphs(max_n=7))
def test_independence_number_matches_oracle(g):
    indep = maximum_independent_set(g)
    assert len(indep) == alpha_oracle(g) == independence_number(g)
    assert not any(g.has_edge(a, b) for a, b in itertools.combinations(indep, 2))


@given(undirected_graphs(max_n=6))
def test_intersection_number_matches_oracle(g):
    assert intersection_number(g) == delta_oracle(g)
    assert intersection_number(g) >= independence_number(g)


@given(undirected_graphs(max_n=7))
def test_maximal_cliques_match_networkx(g):
    ours = sorted(maximal_cliques(g))
    theirs = sorted(sum(1 << v for v in c) for c in nx.find_cliques(nx_graph(g)))
    assert ours == theirs


@given(uec_graphs())
def test_cover_is_closed_neighborhoods_of_centers(g):
    cover = min_edge_clique_cover(g)
    assert len(cover) == independence_number(g)
    assert UndirectedGraph.from_cliques(g.n, cover.cliques) == g
    for c, clique in zip(cover.centers, cover.cliques):
        assert clique == g.closed_neighborhood(c)
        assert c == min(v for v in clique if g.closed_neighborhood(v) == clique)


@given(uec_graphs())
def test_id_roundtrip(g):
    assert id_to_graph(g.n, uec_id(g)) == g


# ---------------------------------------------------------------------------
# Monomial representations


def test_same_image_example():
    u = MonomialRep.of(5, [(0, {1, 2}), (3, {2, 4})])
    u2 = MonomialRep.of(5, [(0, {2, 4}), (3, {1, 2})])
    u3 = MonomialRep.of(5, [(0, {2}), (3, {1, 2, 4})])
    stats = {sufficient_statistic(r) for r in (u, u2, u3)}
    assert len(stats) == 1
    (stat,) = stats
    assert stat.sources == (0, 3)
    assert stat.assn == (0, 1, 2, 0, 1)
    assert u.realize() != u2.realize()


def test_monomial_rep_of_reduction_example():
    g = UndirectedGraph.from_cliques(6, [{0, 1}, {1, 2, 3}, {3, 4, 5}])
    rep = monomial_rep(g)
    assert rep.terms == ((0, frozenset({1})), (2, frozenset({1, 3})), (4, frozenset({3, 5})))
    assert str(rep) == "x[0|1]x[2|1,3]x[4|3,5]"
    # clique {3,4,5} has two private vertices
    assert len(all_monomial_reps(g)) == 2


@pytest.mark.parametrize(
    "terms",
    [
        [(0, {1}), (1, {2})],  # source in a tail
        [(0, {1}), (0, {2})],  # duplicate source
        [(0, {1})],  # vertex 2 uncovered
        [(0, {5}), (2, set())],  # out of range
    ],
)
def test_invalid_monomial_reps(terms):
    with pytest.raises(ValueError):
        MonomialRep.of(3, terms)


@given(uec_graphs())
def test_every_representation_realizes_the_graph(g):
    reps = all_monomial_reps(g)
    assert monomial_rep(g) in reps
    for rep in reps:
        assert rep.realize() == g
        assert len(rep.terms) == independence_number(g)
        stat = sufficient_statistic(rep)
        assert sum(stat.assn) == sum(len(t) for t in rep.tails)


def test_enumeration_count_binomial_sanity():
    # n = 2: empty and single edge
    assert [g.edges for g in enumerate_uec_representatives(2)] == [frozenset(), frozenset({(0, 1)})]
    assert len(pair_list(6)) == comb(6, 2)
