"""Reduction move, alternating tests, order-O selector, intersections."""

from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from redforge.multigraph import (
    EdgeAbsent,
    MultiGraph,
    NotComposable,
    ProvEdge,
    RootMismatch,
    complete_graph,
    derived_from_edge,
    graph,
    graph_from_obj,
    graph_intersection,
    graph_to_obj,
    is_alternating,
    is_alternating_graph,
    is_derived_from,
    is_derived_from_sum,
    next_reduction_O,
    path_graph,
    reduce,
    reducible_pairs,
)


def edge_ends(g):
    return [(e.src, e.dst) for e in g.edges]


def test_root_ids_follow_canonical_sort():
    g = graph(3, [(2, 3), (1, 2)])
    assert [(e.src, e.dst, e.prov) for e in g.edges] == [(1, 2, (1,)), (2, 3, (2,))]


def test_loops_rejected():
    with pytest.raises(ValueError):
        graph(3, [(2, 2)])
    with pytest.raises(ValueError):
        graph(2, [(1, 3)])


def test_reduce_p3():
    g = path_graph(3)
    a, b = g.edges
    g1, g2, g3 = reduce(g, a, b)
    assert edge_ends(g1) == [(1, 2), (1, 3)]
    assert edge_ends(g2) == [(1, 3), (2, 3)]
    assert edge_ends(g3) == [(1, 3)]
    new = [e for e in g1.edges if e.ends == (1, 3)][0]
    assert new.prov == (1, 2)


def test_reduce_p4_first_pair():
    g = path_graph(4)
    a = g.edges[0]
    b = g.edges[1]
    g1, g2, g3 = reduce(g, a, b)
    assert edge_ends(g1) == [(1, 2), (1, 3), (3, 4)]
    assert edge_ends(g2) == [(1, 3), (2, 3), (3, 4)]
    assert edge_ends(g3) == [(1, 3), (3, 4)]


def test_reduce_rejects_bad_composition():
    g = path_graph(3)
    a, b = g.edges
    with pytest.raises(NotComposable):
        reduce(g, b, a)
    other = graph(3, [(1, 2), (1, 3)])
    with pytest.raises(EdgeAbsent):
        reduce(g, other.edges[0], ProvEdge(2, 3, (9,)))


def test_reduce_edge_counts():
    g = graph(5, [(1, 3), (2, 3), (3, 4), (3, 5)])
    pair = next_reduction_O(g)
    g1, g2, g3 = reduce(g, *pair)
    assert len(g1.edges) == len(g.edges)
    assert len(g2.edges) == len(g.edges)
    assert len(g3.edges) == len(g.edges) - 1


def test_is_alternating():
    g = path_graph(3)
    assert not is_alternating(g, 2)
    assert is_alternating(g, 1)
    assert is_alternating(g, 3)
    h = graph(3, [(1, 3)])
    assert is_alternating(h, 2)  # isolated vertex
    assert is_alternating_graph(h)
    fig3 = graph(5, [(1, 3), (2, 3), (3, 4), (3, 5)])
    assert not is_alternating(fig3, 3)


def test_next_reduction_O_fig3():
    g = graph(5, [(1, 3), (2, 3), (3, 4), (3, 5)])
    a, b = next_reduction_O(g)
    assert (a.src, a.dst) == (1, 3)
    assert (b.src, b.dst) == (3, 5)


def test_next_reduction_O_alternating_returns_none():
    assert next_reduction_O(graph(3, [(1, 3)])) is None


def test_next_reduction_O_p4():
    g = path_graph(4)
    a, b = next_reduction_O(g)
    assert (a.src, a.dst) == (1, 2)
    assert (b.src, b.dst) == (2, 3)


def test_graph_intersection_p3_leaves():
    g = path_graph(3)
    g1, g2, g3 = reduce(g, *g.edges)
    inter = graph_intersection(g1, g2)
    assert inter == g3
    assert graph_intersection(g1, g1) == g1


def test_graph_intersection_distinguishes_provenance():
    a = MultiGraph(3, (ProvEdge(1, 3, (1, 2)),))
    b = MultiGraph(3, (ProvEdge(1, 3, (3,)),))
    assert graph_intersection(a, b).edges == ()


def test_graph_intersection_root_mismatch():
    with pytest.raises(RootMismatch):
        graph_intersection(path_graph(3), path_graph(4))


def test_derivation_queries():
    e = ProvEdge(1, 3, (1, 2))
    assert is_derived_from(e, 2)
    assert is_derived_from_sum(e, 1, 2)
    assert not is_derived_from(ProvEdge(2, 3, (2,)), 1)
    assert derived_from_edge(e, ProvEdge(2, 3, (2,)))
    assert not derived_from_edge(ProvEdge(2, 3, (2,)), e)


def test_json_round_trip():
    g = graph(4, [(1, 2), (1, 2), (2, 4)])
    assert graph_from_obj(graph_to_obj(g)) == g
    with pytest.raises(ValueError):
        graph_from_obj({"edges": [[1, 2]]})


small_graphs = st.integers(2, 5).flatmap(
    lambda n: st.lists(
        st.tuples(st.integers(1, n - 1), st.integers(2, n)).filter(lambda p: p[0] < p[1]),
        min_size=1,
        max_size=5,
    ).map(lambda pairs: graph(n, pairs))
)


@given(small_graphs)
@settings(max_examples=120, deadline=None)
def test_order_O_empty_iff_alternating(g):
    assert (next_reduction_O(g) is None) == is_alternating_graph(g)


@given(small_graphs)
@settings(max_examples=120, deadline=None)
def test_order_O_deterministic(g):
    copy = MultiGraph(g.n, g.edges)
    assert next_reduction_O(g) == next_reduction_O(copy)


@given(small_graphs)
@settings(max_examples=120, deadline=None)
def test_reduce_properties(g):
    for a, b in reducible_pairs(g):
        g1, g2, g3 = reduce(g, a, b)
        assert len(g3.edges) == len(g.edges) - 1
        assert graph_intersection(g1, g2) == g3
        # every root id keeps a witness edge in each outcome
        ids = {i for e in g.edges for i in e.prov}
        for gk in (g1, g2, g3):
            assert {i for e in gk.edges for i in e.prov} == ids
        # exact provenance-mass laws: G1 gains a copy of P(a), G2 of P(b),
        # G3 preserves the mass with a and b merged into one edge
        mass = lambda h: Counter(i for e in h.edges for i in e.prov)
        assert mass(g1) == mass(g) + Counter(a.prov)
        assert mass(g2) == mass(g) + Counter(b.prov)
        assert mass(g3) == mass(g)


def test_reducible_pairs_canonical_order():
    g = complete_graph(3)
    pairs = reducible_pairs(g)
    assert pairs == sorted(pairs)
    assert len(pairs) == 1
