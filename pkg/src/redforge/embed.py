"""Embeddability of reduction trees, b_H maps, and h-polynomials.

At a non-leaf H reduced on (a,b), the map b_H matches each full-dimensional
leaf L of the middle subtree with the full-dimensional leaf L' of the right
subtree that has E(L') = E(L) + {e} for a single extra edge e.  Weak
embeddability demands such a matching exists with unique preimages; strong
embeddability additionally transports preceding facets across b_H; extra
strong embeddability preserves the number of (1,n) edges.

Two independent constructions of b_H are provided: the order-O replay of
the defining recipe, and a brute-force matcher that works on any tree.
They are cross-checked wherever both apply.

The h-polynomial of a strong-embeddable tree sums, over full-dimensional
leaves, the product of the weights of their preceding facets; a preceding
facet is weighted beta_a where a is the smaller vertex of the first edge
of the unique middle step on its path.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from .multigraph import (
    MultiGraph,
    ProvEdge,
    derived_from_edge,
    derived_from_sum_edges,
    graph_intersection,
    graph_to_obj,
    is_alternating_graph,
    next_reduction_O,
)
from .poly import Polynomial, VAR_T, collapse_beta, mark_t_edge, reduced_form, set_x_to_one, shift_beta, var_beta
from .redtree import (
    ReductionTree,
    TreeNode,
    full_dim_leaves_dfs,
    iter_nodes,
    leaves_dfs,
    middle_steps,
    preceding_facets,
    relative_path,
)

LEVELS = ("none", "weak", "strong", "extra-strong")


class ScopeError(RuntimeError):
    """The tree lacks the structural property the operation requires."""


@dataclass
class BHMap:
    node: TreeNode
    side: str  # "R" or "L"
    pairs: dict  # M-subtree leaf -> (image leaf, witness edge)

    def image(self) -> set:
        return {id(lp) for lp, _ in self.pairs.values()}


@dataclass
class EmbedVerdict:
    level: str
    failures: list = field(default_factory=list)  # dicts: node path, clause, witnesses

    def at_least(self, level: str) -> bool:
        return LEVELS.index(self.level) >= LEVELS.index(level)

    def to_obj(self) -> dict:
        return {"level": self.level, "failures": self.failures}


def _mr_children(node: TreeNode, side: str) -> tuple[TreeNode, TreeNode]:
    """(middle child, image-side child); side R uses G2, side L uses G1."""
    left, mid, right = node.children
    return (mid, right if side == "R" else left)


def _single_extra_edge(small: MultiGraph, big: MultiGraph) -> Optional[ProvEdge]:
    extra = big.edge_counter() - small.edge_counter()
    missing = small.edge_counter() - big.edge_counter()
    if missing or sum(extra.values()) != 1:
        return None
    return next(iter(extra))


def search_bH(tree: ReductionTree, node: TreeNode, side: str = "R") -> Optional[BHMap]:
    """Brute-force b_H: the matching is forced by the one-extra-edge relation.

    Returns None when the clauses of the weak embeddable property fail at
    this node: a candidate image with two preimages, an M-leaf with no or
    with several images, or an eligible image left uncovered.
    """
    mid, img = _mr_children(node, side)
    m_leaves = full_dim_leaves_dfs(mid)
    i_leaves = full_dim_leaves_dfs(img)
    preimages: dict = {}
    for lp in i_leaves:
        cands = []
        for l in m_leaves:
            e = _single_extra_edge(l.graph, lp.graph)
            if e is not None:
                cands.append((l, e))
        if len(cands) > 1:
            return None  # uniqueness clause fails
        if cands:
            preimages[id(lp)] = (lp, cands[0])
    pairs: dict = {}
    used = set()
    for l in m_leaves:
        images = [lp for lp, (cand, _) in preimages.values() if cand is l]
        if len(images) != 1:
            return None  # no image, or two eligible images force non-injectivity
        lp = images[0]
        e = preimages[id(lp)][1][1]
        pairs[l] = (lp, e)
        used.add(id(lp))
    if used != set(preimages.keys()):
        return None  # an eligible image is not covered
    return BHMap(node=node, side=side, pairs=pairs)


def build_bH_orderO(tree: ReductionTree, node: TreeNode) -> BHMap:
    """The replay construction of b_H for order-O trees.

    For an M-subtree leaf with step sequence (a,b,M),(c_1,d_1,X_1),... the
    image is reached from the right child by copying X_j whenever the order
    O selects the same pair, and otherwise dropping the edge derived from b
    but not from a+b.
    """
    if not tree.is_order_O:
        raise ScopeError("replay construction is defined for order-O trees; use search_bH")
    if node.is_leaf:
        raise ValueError("b_H lives at non-leaf nodes")
    a, b = node.pair
    mid, right = _mr_children(node, "R")
    pairs: dict = {}
    for leaf in full_dim_leaves_dfs(mid):
        steps = _steps_below(mid, leaf)
        cursor = 0
        g = right.graph
        walk = right
        while not is_alternating_graph(g):
            sel = next_reduction_O(g)
            if cursor < len(steps) and sel == steps[cursor][0]:
                branch = steps[cursor][1]
                cursor += 1
            else:
                e1, e2 = sel
                off1 = derived_from_edge(e1, b) and not derived_from_sum_edges(e1, a, b)
                off2 = derived_from_edge(e2, b) and not derived_from_sum_edges(e2, a, b)
                if off1 == off2:
                    raise ScopeError(
                        f"replay at {node.path!r} sees no unique b*-edge in {sel}"
                    )
                branch = "R" if off1 else "L"
            walk = walk.children[{"L": 0, "M": 1, "R": 2}[branch]]
            g = walk.graph
        if cursor != len(steps):
            raise ScopeError(f"replay at {node.path!r} did not consume all M-side steps")
        e = _single_extra_edge(leaf.graph, walk.graph)
        if e is None:
            raise ScopeError(f"replay at {node.path!r} produced a non-adjacent image")
        pairs[leaf] = (walk, e)
    return BHMap(node=node, side="R", pairs=pairs)


def _steps_below(root: TreeNode, leaf: TreeNode) -> list[tuple[tuple, str]]:
    """(pair, branch) steps from root down to leaf; full-dim paths are L/R only."""
    steps = []
    walk = root
    for ch in relative_path(root, leaf):
        steps.append((walk.pair, ch))
        walk = walk.children[{"L": 0, "M": 1, "R": 2}[ch]]
    assert all(br in "LR" for _, br in steps), "full-dimensional leaf cannot pass M"
    return steps


def check_embeddability(tree: ReductionTree, side: str = "R") -> EmbedVerdict:
    """Highest level in none < weak < strong < extra-strong achieved by the tree."""
    cache_key = ("verdict", side)
    if cache_key in tree._embed_cache:
        return tree._embed_cache[cache_key]
    failures = []
    level = 3  # index into LEVELS, start optimistic
    n = tree.root.graph.n
    for node in iter_nodes(tree.root):
        if node.is_leaf:
            continue
        bh = search_bH(tree, node, side)
        if tree.is_order_O and side == "R":
            replay = build_bH_orderO(tree, node)
            if bh is None or _map_shape(replay) != _map_shape(bh):
                raise RuntimeError(
                    f"replay and brute-force b_H disagree at {node.path!r}"
                )
        if bh is None:
            failures.append({"node": node.path, "clause": "weak", "witness": None})
            level = 0
            break
        if level >= 2 and not _strong_at(node, bh, side, failures):
            level = 1
        if level >= 3:
            for l, (lp, e) in bh.pairs.items():
                if _t_count(l.graph, n) != _t_count(lp.graph, n):
                    failures.append(
                        {
                            "node": node.path,
                            "clause": "extra-strong",
                            "witness": {
                                "leaf": graph_to_obj(l.graph, with_prov=True),
                                "image": graph_to_obj(lp.graph, with_prov=True),
                            },
                        }
                    )
                    level = 2
                    break
    verdict = EmbedVerdict(level=LEVELS[level], failures=failures)
    tree._embed_cache[cache_key] = verdict
    return verdict


def _map_shape(bh: BHMap) -> dict:
    return {id(l): (id(lp), e) for l, (lp, e) in bh.pairs.items()}


def _t_count(g: MultiGraph, n: int) -> int:
    return g.count_edges(1, n)


def _strong_at(node: TreeNode, bh: BHMap, side: str, failures: list) -> bool:
    """Both clauses of the strong property at one node: the preceding facets of
    an image leaf inside the image subtree are exactly the transported Z+e."""
    mid, img = _mr_children(node, side)
    ok = True
    for l, (lp, e) in bh.pairs.items():
        zs = Counter(h.graph.plus(e) for h in preceding_facets(mid, l))
        ks = Counter(h.graph for h in preceding_facets(img, lp))
        if zs != ks:
            failures.append(
                {
                    "node": node.path,
                    "clause": "strong",
                    "witness": {
                        "leaf": graph_to_obj(l.graph, with_prov=True),
                        "transported": len(zs),
                        "found": len(ks),
                    },
                }
            )
            ok = False
    return ok


def facet_weight(tree: ReductionTree, facet: TreeNode) -> Polynomial:
    """beta_a for the unique middle step on the root->facet path."""
    mids = middle_steps(tree.root, facet)
    if len(mids) != 1:
        raise ScopeError(
            f"facet at {facet.path!r} has {len(mids)} middle steps on its path; "
            "weight is defined through exactly one"
        )
    return Polynomial.variable(var_beta(mids[0].pair[0].src))


def h_poly(tree: ReductionTree, mode: str = "frak") -> Polynomial:
    """The h-polynomial of a strong-embeddable tree; mode in {"frak", "beta", "frak_t"}.

    Computed through the deletion recursion h = h_L + h_R + (beta_i - 1) h_M
    with h = 1 at leaves (t^{count of (1,n) edges} in frak_t mode).  This is
    the quantity the shifted reduced form equals; its single-beta collapse
    agrees with the facet-product form h_poly_facets, whose finer
    multiparameter grading genuinely differs on some trees (see
    h_poly_facets).
    """
    verdict = check_embeddability(tree)
    if not verdict.at_least("strong"):
        raise ScopeError(f"h-polynomial needs the strong property; got {verdict.level}")
    if mode not in ("frak", "beta", "frak_t"):
        raise ValueError(f"unknown mode {mode!r}")
    n = tree.root.graph.n

    def rec(node: TreeNode) -> Polynomial:
        if node.is_leaf:
            if mode == "frak_t":
                return Polynomial.variable(VAR_T) ** _t_count(node.graph, n)
            return Polynomial.const(1)
        left, mid, right = node.children
        b_i = Polynomial.variable(var_beta(node.pair[0].src))
        return rec(left) + rec(right) + (b_i - 1) * rec(mid)

    out = rec(tree.root)
    if mode == "beta":
        out = collapse_beta(out)
    return out


def h_poly_facets(tree: ReductionTree, mode: str = "frak") -> Polynomial:
    """Sum over full-dimensional leaves of the product of their preceding
    facets' weights (beta of the unique middle step on the facet's path).

    Warning: as a multiparameter polynomial this can differ from h_poly —
    the facet weights do not transport across b_H (P_4 is the smallest
    case, where this gives 1 + 3 b1 + b1 b2 against 1 + 2 b1 + b2 + b1^2).
    Setting all beta_i equal always reconciles the two.
    """
    verdict = check_embeddability(tree)
    if not verdict.at_least("strong"):
        raise ScopeError(f"h-polynomial needs the strong property; got {verdict.level}")
    if mode not in ("frak", "beta", "frak_t"):
        raise ValueError(f"unknown mode {mode!r}")
    n = tree.root.graph.n
    out = Polynomial.zero()
    for leaf in full_dim_leaves_dfs(tree.root):
        term = Polynomial.const(1)
        for facet in preceding_facets(tree.root, leaf):
            term = term * facet_weight(tree, facet)
        if mode == "frak_t":
            term = term * Polynomial.variable(VAR_T) ** _t_count(leaf.graph, n)
        out = out + term
    if mode == "beta":
        out = collapse_beta(out)
    return out


def weighted_leaf_sum(tree: ReductionTree) -> dict:
    """Expand sum_i prod_j (F_i + w(Q_j^i) Q_j^i) into {graph: beta-polynomial}."""
    out: dict = {}
    for leaf in full_dim_leaves_dfs(tree.root):
        terms = [(leaf.graph, Polynomial.const(1))]
        for facet in preceding_facets(tree.root, leaf):
            w = facet_weight(tree, facet)
            terms = terms + [
                (graph_intersection(g, facet.graph), c * w) for g, c in terms
            ]
        for g, c in terms:
            out[g] = out.get(g, Polynomial.zero()) + c
    return {g: c for g, c in out.items() if c}


def check_weighted_leaf_sum(tree: ReductionTree) -> tuple[bool, Optional[dict]]:
    """The weighted expansion must deliver each leaf once, with coefficients
    that restrict to the balance on leaves at most one edge short of full."""
    expansion = weighted_leaf_sum(tree)
    by_graph: dict = {}
    for leaf in leaves_dfs(tree.root):
        by_graph.setdefault(leaf.graph, []).append(leaf)
    if set(expansion) != set(by_graph):
        extra = [g for g in expansion if g not in by_graph]
        missing = [g for g in by_graph if g not in expansion]
        return False, {"extra": extra, "missing": missing}
    full = len(tree.root.graph.edges)
    for g, poly in expansion.items():
        occurrences = by_graph[g]
        if sum(poly.terms.values()) != len(occurrences):
            return False, {"graph": g, "coefficient_mass": sum(poly.terms.values()),
                           "occurrences": len(occurrences)}
        if len(g.edges) >= full - 1:
            want = Polynomial.zero()
            for leaf in occurrences:
                want = want + balance(tree, leaf)
            if poly != want:
                return False, {"graph": g, "got": poly, "want_balances": want}
    return True, None


def balance(tree: ReductionTree, leaf: TreeNode) -> Polynomial:
    """Product of beta_{i_a} over all middle steps on the root->leaf path."""
    term = Polynomial.const(1)
    for node in middle_steps(tree.root, leaf):
        term = term * Polynomial.variable(var_beta(node.pair[0].src))
    return term


def _is_path_root(g: MultiGraph) -> bool:
    want = sorted((i, i + 1) for i in range(1, g.n))
    return sorted(e.ends for e in g.edges) == want and all(
        len(e.prov) == 1 for e in g.edges
    )


def component_formula(tree: ReductionTree, leaf: TreeNode) -> Polynomial:
    """Balance of a leaf of R_{P_n} from the component statistic f_G(i).

    A component counts for the shortest edge whose span strictly contains
    all of its vertices; it contributes to the beta index of that edge's
    initial vertex.  Components with no strictly covering edge contribute
    nothing.
    """
    if not _is_path_root(tree.root.graph):
        raise ScopeError("component formula is stated for path-graph roots")
    g = leaf.graph
    comps = _components(g)
    f: Counter = Counter()
    for comp in comps:
        covering = [
            e
            for e in g.edges
            if all(e.src < v < e.dst for v in comp)
        ]
        if not covering:
            continue
        best = min(covering, key=lambda e: (e.dst - e.src, e.src, e.dst, e.prov))
        f[best.src] += 1
    return Polynomial.monomial([(var_beta(i), m) for i, m in f.items()])


def _components(g: MultiGraph) -> list[set]:
    parent = {v: v for v in range(1, g.n + 1)}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in g.edges:
        parent[find(e.src)] = find(e.dst)
    groups: dict = {}
    for v in range(1, g.n + 1):
        groups.setdefault(find(v), set()).add(v)
    return list(groups.values())


def _first_difference(p: Polynomial, q: Polynomial):
    diff = p - q
    if not diff:
        return None
    mono, coeff = diff.canonical_terms()[0]
    return {"monomial": [list(v) + [e] for v, e in mono], "difference": coeff}


def check_qh_identity(tree: ReductionTree) -> tuple[bool, Optional[dict]]:
    """Q(b-1) at x=1 against h(b); needs the strong property (ScopeError else)."""
    lhs = shift_beta(set_x_to_one(reduced_form(tree)), -1)
    rhs = h_poly(tree, "frak")
    witness = _first_difference(lhs, rhs)
    return witness is None, witness


def check_qht_identity(tree: ReductionTree) -> tuple[bool, Optional[dict]]:
    """Q(b-1, t) against h(b, t); needs the extra strong property."""
    verdict = check_embeddability(tree)
    if not verdict.at_least("extra-strong"):
        raise ScopeError(f"q-ht identity needs extra strong; got {verdict.level}")
    n = tree.root.graph.n
    lhs = shift_beta(mark_t_edge(reduced_form(tree), n), -1)
    rhs = h_poly(tree, "frak_t")
    witness = _first_difference(lhs, rhs)
    return witness is None, witness


def check_theorem7(tree: ReductionTree) -> tuple[bool, list]:
    """Coefficientwise nonnegativity of every c_I(t); needs extra strong."""
    verdict = check_embeddability(tree)
    if not verdict.at_least("extra-strong"):
        raise ScopeError(f"theorem-7 check needs extra strong; got {verdict.level}")
    from .poly import check_c7_multiparameter

    n = tree.root.graph.n
    q = mark_t_edge(reduced_form(tree), n)
    v = check_c7_multiparameter(q)
    return v.holds, v.witnesses
