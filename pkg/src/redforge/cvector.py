"""Symbolic coordinate vectors rewritten along reduction paths.

Each root edge owns a base variable.  A node's c-vector assigns every one
of its edges a linear form in the base variables; reducing on (g1, g2)
rewrites the three affected coordinates as

    left:   g1 -> c(g1) - c(g2),  g2 -> gone,  new edge -> c(g2)
    right:  g2 -> c(g2) - c(g1),  g1 -> gone,  new edge -> c(g1)
    middle: both gone, new edge -> c(g1), plus the constraint c(g1) = c(g2)

so middle steps accumulate linear constraints.  Vectors are kept in a
canonical form: constraints in reduced row echelon form and every
coordinate form reduced modulo them, which makes equality of vectors the
plain equality of dictionaries.

Forms are keyed by the provenance edge itself rather than by positional
slots: the two are equivalent, and edge keys stay unambiguous when a
parallel copy disappears.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .multigraph import MultiGraph, ProvEdge, merge_edge
from .redtree import ReductionTree, TreeNode, descend_nodes
from .geom import SlotMismatch

LinForm = dict[int, Fraction]  # base variable id -> coefficient


def _sub(a: LinForm, b: LinForm) -> LinForm:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) - v
        if not out[k]:
            del out[k]
    return out


def _scale(a: LinForm, f: Fraction) -> LinForm:
    return {k: v * f for k, v in a.items() if v * f}


def rref(rows: list[LinForm]) -> tuple[tuple, ...]:
    """Reduced row echelon form over the rationals, canonically ordered."""
    work = [dict(r) for r in rows if r]
    done: list[LinForm] = []
    while work:
        pivot_var = min(min(r) for r in work)
        with_pivot = [r for r in work if pivot_var in r]
        rest = [r for r in work if pivot_var not in r]
        lead = _scale(with_pivot[0], 1 / with_pivot[0][pivot_var])
        for r in with_pivot[1:]:
            reduced = _sub(r, _scale(lead, r[pivot_var]))
            if reduced:
                rest.append(reduced)
        done = [_sub(d, _scale(lead, d[pivot_var])) if pivot_var in d else d for d in done]
        done.append(lead)
        work = rest
    done = [d for d in done if d]
    canon = sorted(tuple(sorted(d.items())) for d in done)
    return tuple(canon)


def reduce_mod(form: LinForm, rows: tuple) -> LinForm:
    out = dict(form)
    for row in rows:
        r = dict(row)
        pivot = min(r)
        if pivot in out and out[pivot]:
            out = _sub(out, _scale(r, out[pivot] / r[pivot]))
    return {k: v for k, v in out.items() if v}


@dataclass
class CVector:
    """Coordinate forms for every edge present (zero forms kept explicit)."""

    forms: dict  # ProvEdge -> LinForm, reduced mod constraints
    constraints: tuple  # canonical rref rows

    def __eq__(self, other) -> bool:
        # absent coordinates are zero by convention, so equality compares
        # the nonzero forms plus the constraint space
        return (
            isinstance(other, CVector)
            and self.constraints == other.constraints
            and self.nonzero() == other.nonzero()
        )

    def nonzero(self) -> dict:
        return {e: f for e, f in self.forms.items() if f}

    def form(self, e: ProvEdge) -> LinForm:
        return dict(self.forms.get(e, {}))


def _canonical(forms: dict, rows: list[LinForm]) -> CVector:
    canon_rows = rref(rows)
    reduced = {e: reduce_mod(f, canon_rows) for e, f in forms.items()}
    return CVector(forms=reduced, constraints=canon_rows)


def cvector_init(root: MultiGraph) -> CVector:
    """Each root edge is its own base variable."""
    return CVector(
        forms={e: {e.prov[0]: Fraction(1)} for e in root.edges}, constraints=()
    )


def cvector_propagate(c: CVector, pair: tuple[ProvEdge, ProvEdge], branch: str) -> CVector:
    g1, g2 = pair
    if g1 not in c.forms or g2 not in c.forms:
        raise SlotMismatch(f"reduction pair {pair} has no coordinates here")
    f1 = c.form(g1)
    f2 = c.form(g2)
    forms = {e: f for e, f in c.forms.items() if e not in (g1, g2)}
    g3 = merge_edge(g1, g2)
    rows = [dict(r) for r in map(dict, c.constraints)]
    if branch == "L":
        forms[g1] = _sub(f1, f2)
        forms[g3] = f2
    elif branch == "R":
        forms[g2] = _sub(f2, f1)
        forms[g3] = f1
    elif branch == "M":
        forms[g3] = f1
        rows.append(_sub(f1, f2))
    else:
        raise ValueError(f"bad branch {branch!r}")
    return _canonical(forms, rows)


def cvector_for_node(tree: ReductionTree, node: TreeNode) -> CVector:
    c = cvector_init(tree.root.graph)
    chain = descend_nodes(tree.root, node)
    for parent, child in zip(chain, chain[1:]):
        c = cvector_propagate(c, parent.pair, child.branch)
    return c


def cvector_intersect(c1: CVector, c2: CVector) -> CVector:
    """Impose coordinatewise equality of the two vectors on the base
    variables and return the constrained first vector."""
    rows = [dict(r) for r in map(dict, c1.constraints)]
    rows += [dict(r) for r in map(dict, c2.constraints)]
    for e in set(c1.forms) | set(c2.forms):
        rows.append(_sub(c1.form(e), c2.form(e)))
    return _canonical(dict(c1.forms), rows)


def cvector_zero_outside(c: CVector, keep: MultiGraph) -> CVector:
    """The alternative description of the intersection: kill every
    coordinate not in the intersection graph."""
    kept = set(keep.edges)
    rows = [dict(r) for r in map(dict, c.constraints)]
    rows += [c.form(e) for e in c.forms if e not in kept]
    return _canonical(dict(c.forms), rows)


def forms_independent(c: CVector) -> bool:
    """Rank of the nonzero coordinate forms equals their number."""
    rows = [dict(f) for f in c.forms.values() if f]
    return len(rref(rows)) == len(rows)


def verify_cvectors(tree: ReductionTree) -> tuple[bool, Optional[dict]]:
    """Tree-wide consistency of the symbolic coordinates.

    At every internal node the middle child's vector must equal the
    intersection of the left and right children's; leaf pair intersections
    must agree with killing the coordinates outside the graph intersection;
    and every leaf's nonzero forms must be linearly independent.
    """
    from .multigraph import graph_intersection
    from .redtree import full_dim_leaves_dfs, iter_nodes, leaves_dfs

    vectors: dict = {}

    def vec(node: TreeNode) -> CVector:
        if id(node) not in vectors:
            if node.path == "":
                vectors[id(node)] = cvector_init(tree.root.graph)
            else:
                parent_chain = descend_nodes(tree.root, node)
                parent = parent_chain[-2]
                vectors[id(node)] = cvector_propagate(
                    vec(parent), parent.pair, node.branch
                )
        return vectors[id(node)]

    for node in iter_nodes(tree.root):
        if node.is_leaf:
            continue
        left, mid, right = node.children
        if cvector_intersect(vec(left), vec(right)) != vec(mid):
            return False, {"node": node.path, "clause": "middle-vs-intersection"}
    for leaf in leaves_dfs(tree.root):
        if not forms_independent(vec(leaf)):
            return False, {"leaf": leaf.path, "clause": "independence"}
    full = full_dim_leaves_dfs(tree.root)
    for i in range(len(full)):
        for j in range(i):
            ci, cj = vec(full[i]), vec(full[j])
            inter = graph_intersection(full[i].graph, full[j].graph)
            meet = cvector_intersect(ci, cj)
            alt = cvector_zero_outside(ci, inter)
            if meet != alt:
                return False, {
                    "pair": [full[j].path, full[i].path],
                    "clause": "intersection-vs-zeroing",
                }
            if not set(meet.nonzero()) <= set(inter.edges):
                return False, {
                    "pair": [full[j].path, full[i].path],
                    "clause": "support-outside-intersection",
                }
    return True, None
