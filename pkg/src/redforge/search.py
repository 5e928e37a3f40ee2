"""Strategy-space search for counterexample trees.

The expensive space is "all": every complete reduction tree of the root.
Its useful invariant is that the specialized polynomial Q(beta, t) of a
subtree depends only on the *shape* of its root (vertex count plus the
endpoint multiset of its edges), never on provenance.  The search
therefore memoizes, per shape, the set of achievable polynomials together
with one witness choice each, which collapses the tree space drastically
(K_4's complete trees yield 11 distinct polynomials over 81 shapes).

Enumeration order is deterministic: reduction pairs sorted by (i, j, k),
child polynomials combined in the insertion order of their memo tables,
first witness kept.  Witnesses reconstruct to replayable step lists.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .multigraph import MultiGraph, graph, is_alternating_graph, reducible_pairs
from .poly import (
    Polynomial,
    VAR_T,
    check_c7,
    collapse_beta,
    mark_t_edge,
    reduced_form,
    shift_beta,
    var_beta,
)
from .redtree import (
    DepthExceeded,
    RandomStrategy,
    ReductionTree,
    build_tree,
    order_O_strategy,
    strategy_from_steps,
)

Shape = tuple[int, tuple[tuple[int, int], ...]]


class BudgetExhausted(RuntimeError):
    """The search ran out of its work budget before reaching a verdict."""


def shape_of(g: MultiGraph) -> Shape:
    return (g.n, tuple(e.ends for e in g.edges))


def shape_alternating(shape: Shape) -> bool:
    n, edges = shape
    for v in range(1, n + 1):
        if any(e[1] == v for e in edges) and any(e[0] == v for e in edges):
            return False
    return True


def shape_pairs(shape: Shape) -> list[tuple[int, int, int]]:
    _, edges = shape
    uniq = sorted(set(edges))
    return sorted(
        {(a[0], a[1], b[1]) for a in uniq for b in uniq if a[1] == b[0]}
    )


def shape_reduce(shape: Shape, i: int, j: int, k: int) -> tuple[Shape, Shape, Shape]:
    n, edges = shape

    def without(seq, *drop):
        out = list(seq)
        for d in drop:
            out.remove(d)
        return out

    ik = (i, k)
    s1 = (n, tuple(sorted(without(edges, (j, k)) + [ik])))
    s2 = (n, tuple(sorted(without(edges, (i, j)) + [ik])))
    s3 = (n, tuple(sorted(without(edges, (i, j), (j, k)) + [ik])))
    return s1, s2, s3


def _leaf_poly(shape: Shape) -> Polynomial:
    n, edges = shape
    t_count = sum(1 for e in edges if e == (1, n))
    return Polynomial.variable(VAR_T) ** t_count


@dataclass
class _Budget:
    limit: int
    used: int = 0

    def spend(self, amount: int = 1) -> None:
        self.used += amount
        if self.used > self.limit:
            raise BudgetExhausted(f"work budget {self.limit} exhausted")


def achievable_polynomials(
    root: MultiGraph, budget: int = 10**6
) -> dict[Shape, dict]:
    """Memo table: shape -> {poly key: (polynomial, witness)}.

    The witness for a non-leaf entry is (i, j, k, key_L, key_M, key_R)
    referring into the children's tables; None marks an alternating leaf.
    """
    memo: dict[Shape, dict] = {}
    counter = _Budget(budget)
    beta = Polynomial.variable(var_beta(0))

    def rec(shape: Shape) -> dict:
        if shape in memo:
            return memo[shape]
        table: dict = {}
        memo[shape] = table
        if shape_alternating(shape):
            p = _leaf_poly(shape)
            table[p.key()] = (p, None)
            return table
        for (i, j, k) in shape_pairs(shape):
            s1, s2, s3 = shape_reduce(shape, i, j, k)
            a1, a2, a3 = rec(s1), rec(s2), rec(s3)
            for k1, (p1, _) in list(a1.items()):
                for k3, (p3, _) in list(a3.items()):
                    base = p1 + beta * p3
                    for k2, (p2, _) in list(a2.items()):
                        counter.spend()
                        q = base + p2
                        key = q.key()
                        if key not in table:
                            table[key] = (q, (i, j, k, k1, k3, k2))
        return table

    rec(shape_of(root))
    return memo


def witness_steps(memo: dict, shape: Shape, key, path: str = "") -> list[dict]:
    """Replayable step list for the memoized witness of (shape, key)."""
    _, wit = memo[shape][key]
    if wit is None:
        return []
    i, j, k, k1, k3, k2 = wit
    s1, s2, s3 = shape_reduce(shape, i, j, k)
    steps = [{"at": path, "i": i, "j": j, "k": k, "ci": 0, "cj": 0}]
    steps += witness_steps(memo, s1, k1, path + "L")
    steps += witness_steps(memo, s3, k3, path + "M")
    steps += witness_steps(memo, s2, k2, path + "R")
    return steps


def tree_q_poly(tree: ReductionTree) -> Polynomial:
    """Q(beta, t): the reduced form specialized to x_(1,n) = t, others 1,
    all beta_i collapsed."""
    n = tree.root.graph.n
    return collapse_beta(mark_t_edge(reduced_form(tree), n))


@dataclass
class SearchOutcome:
    found: bool
    exhausted: bool
    space: str
    predicate: str
    examined: int = 0
    polynomial: Optional[Polynomial] = None  # the shifted Q(beta-1, t)
    witness_steps: Optional[list] = None
    witnesses_summary: list = field(default_factory=list)


def _violates_c7(q: Polynomial) -> bool:
    return not check_c7(q).holds


def iter_complete_trees(
    g: MultiGraph, budget: int = 10**5
) -> Iterator[ReductionTree]:
    """All complete reduction trees, lexicographic over branch-choice lists.

    A choice assigns to each expandable node (in preorder) the index of the
    reduction pair taken there; no shape collapsing, so use budgets.
    """
    counter = _Budget(budget)

    def expand(choices: dict) -> Optional[tuple[ReductionTree, list]]:
        """Build under the partial choice map; returns the tree and the
        preorder list of (path, pair count) where choices were consulted."""
        consulted = []

        def strategy(graph_, path):
            pairs = reducible_pairs(graph_)
            if not pairs:
                return None
            idx = choices.setdefault(path, 0)
            consulted.append((path, len(pairs)))
            return pairs[idx]

        tree = build_tree(g, strategy, name="enumerated")
        return tree, consulted

    choices: dict = {}
    while True:
        counter.spend()
        tree, consulted = expand(choices)
        yield tree
        # advance the last consulted choice with room, odometer style
        while consulted:
            path, width = consulted[-1]
            if choices[path] + 1 < width:
                choices[path] += 1
                # drop decisions made at or below later nodes
                keep = {p for p, _ in consulted[:-1]} | {path}
                choices = {p: v for p, v in choices.items() if p in keep}
                break
            consulted.pop()
        else:
            return


def search_c7(
    root: MultiGraph,
    space: str = "all",
    seed: int = 0,
    samples: int = 100,
    budget: int = 10**6,
    target_poly: Optional[Polynomial] = None,
    predicate: str = "c7-violation",
) -> SearchOutcome:
    """Hunt a complete reduction tree violating the target predicate.

    predicate "c7-violation" finds a tree whose Q(beta-1, t) has a negative
    coefficient in some c_k(t); the level predicates find a tree lacking
    the named embeddability level.  target_poly (a shifted Q(beta-1, t))
    narrows the hunt to trees realizing that exact polynomial.
    """
    if space == "all" and predicate == "c7-violation":
        memo = achievable_polynomials(root, budget)
        root_shape = shape_of(root)
        outcome = SearchOutcome(found=False, exhausted=True, space=space, predicate=predicate)
        for key, (q, _) in memo[root_shape].items():
            outcome.examined += 1
            shifted = shift_beta(q, -1)
            hit = (
                shifted == target_poly
                if target_poly is not None
                else _violates_c7(q)
            )
            if _violates_c7(q):
                outcome.witnesses_summary.append(
                    {"polynomial": repr(shifted)}
                )
            if hit:
                outcome.found = True
                outcome.polynomial = shifted
                outcome.witness_steps = witness_steps(memo, root_shape, key)
                return outcome
        return outcome
    if space in ("orderO", "random") or (space == "all" and predicate != "c7-violation"):
        return _tree_space_search(root, space, seed, samples, budget, target_poly, predicate)
    raise ValueError(f"unknown strategy space {space!r}")


def _tree_matches(tree: ReductionTree, predicate: str, target_poly) -> tuple[bool, Polynomial]:
    q = tree_q_poly(tree)
    shifted = shift_beta(q, -1)
    if target_poly is not None:
        return shifted == target_poly, shifted
    if predicate == "c7-violation":
        return _violates_c7(q), shifted
    level = {"weak": "weak", "strong": "strong", "extra-strong": "extra-strong"}.get(predicate)
    if level is None:
        raise ValueError(f"unknown predicate {predicate!r}")
    from .embed import check_embeddability

    verdict = check_embeddability(tree)
    return not verdict.at_least(level), shifted


def _tree_space_search(
    root, space, seed, samples, budget, target_poly, predicate
) -> SearchOutcome:
    outcome = SearchOutcome(found=False, exhausted=False, space=space, predicate=predicate)
    if space == "orderO":
        trees = iter((build_tree(root, order_O_strategy, budget=budget),))
    elif space == "random":
        trees = (
            build_tree(root, RandomStrategy(seed + k), budget=budget)
            for k in range(samples)
        )
    else:
        trees = iter_complete_trees(root, budget=budget)
    from .redtree import record_steps

    for tree in trees:
        outcome.examined += 1
        hit, shifted = _tree_matches(tree, predicate, target_poly)
        if hit:
            outcome.found = True
            outcome.polynomial = shifted
            outcome.witness_steps = record_steps(tree)
            return outcome
    outcome.exhausted = True
    return outcome


def replay_search_witness(root: MultiGraph, steps: list[dict]) -> ReductionTree:
    return build_tree(root, strategy_from_steps(steps), name="replay")
