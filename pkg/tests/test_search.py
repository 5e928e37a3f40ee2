"""Strategy-space search: memoized polynomial enumeration and witnesses."""

import pytest

from redforge.multigraph import complete_graph, path_graph
from redforge.poly import (
    Polynomial,
    VAR_T,
    check_c7,
    shift_beta,
    var_beta,
)
from redforge.redtree import leaf_census, build_tree
from redforge.search import (
    BudgetExhausted,
    achievable_polynomials,
    iter_complete_trees,
    replay_search_witness,
    search_c7,
    shape_of,
    tree_q_poly,
)


def B(i, e=1):
    return Polynomial.variable(var_beta(i), e)


T = Polynomial.variable(VAR_T)

FIG4 = (
    T**4
    + B(0) * (-(T**2) + 4 * T**3 + 2 * T**4)
    + B(0, 2) * (T**2 + 2 * T**3 + T**4)
)


def test_k4_achievable_polynomials():
    memo = achievable_polynomials(complete_graph(4))
    root_table = memo[shape_of(complete_graph(4))]
    assert len(root_table) == 11
    shifted = [shift_beta(q, -1) for q, _ in root_table.values()]
    violating = [s for s in shifted if any(c < 0 for c in s.terms.values())]
    assert len(violating) == 2
    assert FIG4 in shifted


def test_search_c7_k4_finds_violation():
    outcome = search_c7(complete_graph(4), space="all")
    assert outcome.found
    assert outcome.polynomial is not None
    assert any(c < 0 for c in outcome.polynomial.terms.values())
    # witness replays to the reported polynomial
    tree = replay_search_witness(complete_graph(4), outcome.witness_steps)
    assert shift_beta(tree_q_poly(tree), -1) == outcome.polynomial


def test_search_c7_k4_target_fig4():
    outcome = search_c7(complete_graph(4), space="all", target_poly=FIG4)
    assert outcome.found
    assert outcome.polynomial == FIG4
    tree = replay_search_witness(complete_graph(4), outcome.witness_steps)
    assert shift_beta(tree_q_poly(tree), -1) == FIG4
    assert not check_c7(tree_q_poly(tree)).holds


def test_search_deterministic():
    a = search_c7(complete_graph(4), space="all")
    b = search_c7(complete_graph(4), space="all")
    assert a.polynomial == b.polynomial
    assert a.witness_steps == b.witness_steps


def test_search_order_O_space():
    outcome = search_c7(complete_graph(4), space="orderO")
    assert outcome.examined == 1
    # order O on K4 yields a nonnegative expansion, so no violation
    assert not outcome.found and outcome.exhausted


def test_search_random_space_reproducible():
    a = search_c7(complete_graph(4), space="random", seed=3, samples=12)
    b = search_c7(complete_graph(4), space="random", seed=3, samples=12)
    assert (a.found, a.examined) == (b.found, b.examined)
    assert a.polynomial == b.polynomial


def test_paths_small_have_no_violation():
    for n in (3, 4):
        outcome = search_c7(path_graph(n), space="all")
        assert not outcome.found
        assert outcome.exhausted


def test_p5_has_a_non_embeddable_violation():
    # the exhaustive sweep turns up a P5 tree with c_1(t) = -1 + 7t; its
    # tree has no embeddability at all, consistent with the nonnegativity
    # theorem for extra-strong trees
    from redforge.embed import check_embeddability

    outcome = search_c7(path_graph(5), space="all")
    assert outcome.found
    assert outcome.polynomial.terms[((("b", 0), 1),)] == -1
    tree = replay_search_witness(path_graph(5), outcome.witness_steps)
    assert check_embeddability(tree).level == "none"


def test_budget_exhausted():
    with pytest.raises(BudgetExhausted):
        search_c7(complete_graph(4), space="all", budget=5)


def test_iter_complete_trees_census_invariance():
    g = path_graph(4)
    trees = list(iter_complete_trees(g))
    assert len(trees) > 1
    censuses = {tuple(sorted(leaf_census(t.root).items())) for t in trees}
    assert len(censuses) == 1
    base = leaf_census(build_tree(g).root)
    assert tuple(sorted(base.items())) in censuses


def test_tree_space_level_search():
    # every complete tree of P3 is extra strong: the hunt comes back empty
    outcome = search_c7(path_graph(3), space="all", predicate="extra-strong")
    assert not outcome.found and outcome.exhausted
    # K4 owns trees that are not extra strong
    outcome = search_c7(complete_graph(4), space="all", predicate="extra-strong", budget=2000)
    assert outcome.found
