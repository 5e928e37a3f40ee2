"""Routes, flow vertices, exact ranks, triangulation and shelling checks."""

from fractions import Fraction

import pytest

from redforge.geom import (
    BadProvenance,
    SlotTable,
    check_dim_formula,
    check_reduction_cover,
    face_lp,
    leaf_vertices,
    polytope_dim,
    route_of_edge,
    routes,
    simplex_vertices,
    verify_shelling,
    verify_triangulation,
)
from redforge.lp import enumerate_basic_solutions, exact_rank, solve_lp
from redforge.multigraph import MultiGraph, ProvEdge, complete_graph, graph, path_graph
from redforge.redtree import build_tree, full_dim_leaves_dfs, leaves_dfs


def test_exact_rank():
    assert exact_rank([[1, 0], [0, 1]]) == 2
    assert exact_rank([[1, 2], [2, 4]]) == 1
    assert exact_rank([[Fraction(1, 2), Fraction(1, 3)], [Fraction(3, 2), 1]]) == 1


def test_solve_lp_basics():
    # max x + y st x + y = 1: optimum 1
    res = solve_lp([[1, 1]], [1], [1, 1])
    assert res.status == "optimal" and res.value == 1
    # infeasible: x = -1
    res = solve_lp([[1]], [-1], [1])
    assert res.status == "infeasible"
    # max x st x - y = 0 is unbounded
    res = solve_lp([[1, -1]], [0], [1, 0])
    assert res.status == "unbounded"


def test_routes_counts():
    assert len(routes(graph(2, [(1, 2)]))) == 3
    assert len(routes(graph(1, []))) == 1
    # exhaustive: s1t, s2t, s3t, s12t, s23t, s123t
    assert len(routes(path_graph(3))) == 6


def test_routes_vertex_sequences():
    rs = routes(path_graph(3))
    seqs = [r.vertices for r in rs]
    assert (0, 1, 4) in seqs and (0, 1, 2, 4) in seqs and (0, 1, 2, 3, 4) in seqs
    assert seqs == sorted(seqs)


def test_route_of_edge_expands_provenance():
    g = path_graph(3)
    slots = SlotTable(g)
    e = ProvEdge(1, 3, (1, 2))
    r = route_of_edge(e, slots)
    assert r.vertices == (0, 1, 2, 3, 4)
    assert slots.base_slot(1) in r.slots and slots.base_slot(2) in r.slots


def test_bad_provenance_rejected():
    g = graph(4, [(1, 2), (3, 4)])
    slots = SlotTable(g)
    broken = ProvEdge(1, 4, (1, 2))  # (1,2)+(3,4) does not chain at 2
    with pytest.raises(BadProvenance):
        route_of_edge(broken, slots)


def test_leaf_vertices_p3():
    g = path_graph(3)
    slots = SlotTable(g)
    t = build_tree(g)
    leaves = leaves_dfs(t.root)
    g3 = leaves[1].graph
    vs = leaf_vertices(g3, slots)
    assert len(vs) == 1
    assert len(leaf_vertices(leaves[0].graph, slots)) == 2
    # root graph: one vertex per edge
    assert len(leaf_vertices(g, slots)) == len(g.edges)


def test_parallel_edges_get_distinct_slots():
    g = graph(2, [(1, 2), (1, 2)])
    slots = SlotTable(g)
    assert slots.base_slot(1) != slots.base_slot(2)
    assert len(routes(g)) == 4


def test_polytope_dim():
    g = graph(2, [(1, 2)])
    vs = [r.slots for r in routes(g)]
    assert len(vs) == 3
    assert polytope_dim(vs) == 2
    assert polytope_dim([vs[0]]) == 0


def test_dim_formula_on_leaves():
    for base in (path_graph(4), graph(5, [(1, 3), (2, 3), (3, 4), (3, 5)])):
        slots = SlotTable(base)
        t = build_tree(base)
        for leaf in leaves_dfs(t.root):
            assert check_dim_formula(leaf.graph, slots), leaf.path


def test_face_lp_shared_facet():
    g = path_graph(3)
    slots = SlotTable(g)
    t = build_tree(g)
    l1, l3, l2 = leaves_dfs(t.root)
    v1 = sorted(simplex_vertices(l1.graph, slots), key=sorted)
    v2 = sorted(simplex_vertices(l2.graph, slots), key=sorted)
    common = set(v1) & set(v2)
    assert common == simplex_vertices(l3.graph, slots)
    res = face_lp(v1, v2, common)
    assert res.status == "optimal" and res.value == 0


def test_face_lp_detects_overlap():
    # two segments crossing in their middles do not meet in a common face
    a = [frozenset({0}), frozenset({1})]
    b = [frozenset({0, 2}), frozenset({1, 2})]
    # shared vertices: none; conv(a) and conv(b) are disjoint segments, fine
    res = face_lp(a, b, set())
    assert res.status in ("optimal", "infeasible")
    if res.status == "optimal":
        assert res.value > 0 or res.value == 0


def test_face_lp_against_basic_enumeration_p4():
    g = path_graph(4)
    slots = SlotTable(g)
    t = build_tree(g)
    leaves = full_dim_leaves_dfs(t.root)
    pairs = [(1, 0), (2, 0), (4, 3)]
    for i, j in pairs:
            vi = sorted(simplex_vertices(leaves[i].graph, slots), key=sorted)
            vj = sorted(simplex_vertices(leaves[j].graph, slots), key=sorted)
            common = set(vi) & set(vj)
            res = face_lp(vi, vj, common)
            assert res.status == "optimal" and res.value == 0
            # brute force: every basic feasible point keeps its mass on the
            # shared vertices
            universe = sorted(set().union(*vi, *vj))
            rows = [
                [1 if s in v else 0 for v in vi] + [-1 if s in w else 0 for w in vj]
                for s in universe
            ]
            rows.append([1] * len(vi) + [0] * len(vj))
            rows.append([0] * len(vi) + [1] * len(vj))
            rhs = [0] * len(universe) + [1, 1]
            outside = [
                k
                for k, v in enumerate(list(vi) + list(vj))
                if v not in common
            ]
            for point in enumerate_basic_solutions(rows, rhs):
                assert all(point[k] == 0 for k in outside)


@pytest.mark.parametrize(
    "g",
    [
        path_graph(3),
        path_graph(4),
        graph(5, [(1, 3), (2, 3), (3, 4), (3, 5)]),
        graph(4, [(1, 2), (1, 2), (2, 3), (2, 4)]),
        complete_graph(4),
    ],
)
def test_verify_triangulation_order_O(g):
    t = build_tree(g)
    report = verify_triangulation(t)
    assert report.ok, report.failures
    assert report.scope_verified


def test_verify_triangulation_single_leaf():
    t = build_tree(graph(3, [(1, 3)]))
    report = verify_triangulation(t)
    assert report.ok and report.checked_pairs == 0


@pytest.mark.parametrize(
    "g",
    [
        path_graph(3),
        path_graph(4),
        graph(5, [(1, 3), (2, 3), (3, 4), (3, 5)]),
        complete_graph(4),
    ],
)
def test_verify_shelling_order_O(g):
    t = build_tree(g)
    report = verify_shelling(t)
    assert report.ok, report.failures


def test_shelling_attach_counts_match_h(g=None):
    from redforge.embed import h_poly
    from redforge.poly import var_beta

    g = graph(5, [(1, 3), (2, 3), (3, 4), (3, 5)])
    t = build_tree(g)
    report = verify_shelling(t)
    counts = report.certificates[-1]["attach_counts"]
    h = h_poly(t, "beta")
    from collections import Counter

    s = Counter(counts)
    for k, coeff in [(0, 1)] + [(k, s[k]) for k in sorted(s)]:
        mono = ((var_beta(0), k),) if k else ()
        assert h.terms.get(mono, 0) == s[k]


def test_reduction_cover():
    for g in (path_graph(4), graph(5, [(1, 3), (2, 3), (3, 4), (3, 5)])):
        ok, witness = check_reduction_cover(build_tree(g))
        assert ok, witness
