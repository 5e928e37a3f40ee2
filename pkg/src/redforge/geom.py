"""Exact flow-polytope geometry for reduction trees.

Every graph on [n] is augmented with a source s (vertex 0) and sink t
(vertex n+1) joined to all of [n].  Routes are the maximal s->t paths;
their unit flows are the polytope's vertices.  An edge of a node deep in
a reduction tree is a formal sum of root edges, so it expands to a route
of the ROOT's augmented graph: this embeds every node's polytope into the
root's coordinate space, where all intersections below are computed.

Coordinates are indexed by slots: the lexicographic rank of the edge in
the complete graph on the augmented vertex set, shifted by a stride per
parallel copy.  A vertex is just the set of slots its route covers, since
all entries are 0 or 1.

The triangulation check certifies, for each pair of full-dimensional leaf
simplices, that the convex hulls meet exactly in the face spanned by the
shared vertices: an exact LP maximizes the barycentric mass outside the
shared vertex set subject to lying in both simplices, and optimum 0 is
the certificate.  The shelling check inspects how each simplex attaches
to the union of its predecessors.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .lp import LPResult, exact_rank, solve_lp
from .multigraph import MultiGraph, ProvEdge, graph_intersection
from .redtree import ReductionTree, TreeNode, full_dim_leaves_dfs, iter_nodes

FlowVertex = frozenset  # of slot indices


class BadProvenance(ValueError):
    """An edge's provenance multiset does not chain into a path."""


class SlotMismatch(ValueError):
    """An edge has no slot in this root universe."""


@dataclass
class SlotTable:
    """Coordinate slots for the root's augmented edge space.

    Vertices of the augmented graph are 0 (source), 1..n, n+1 (sink); the
    stride for parallel copies is the edge count of the complete graph on
    those n+2 vertices.
    """

    root: MultiGraph

    def __post_init__(self):
        n = self.root.n
        self.n = n
        self.stride = (n + 2) * (n + 1) // 2
        self._pair_rank = {}
        rank = 0
        for u in range(n + 2):
            for v in range(u + 1, n + 2):
                self._pair_rank[(u, v)] = rank
                rank += 1
        self.edge_by_id = {}
        copies: Counter = Counter()
        for e in self.root.edges:
            eid = e.prov[0]
            copy = copies[e.ends]
            copies[e.ends] += 1
            self.edge_by_id[eid] = (e, copy)

    def base_slot(self, eid: int) -> int:
        if eid not in self.edge_by_id:
            raise SlotMismatch(f"no root edge with id {eid}")
        e, copy = self.edge_by_id[eid]
        return copy * self.stride + self._pair_rank[(e.src, e.dst)]

    def source_slot(self, i: int) -> int:
        return self._pair_rank[(0, i)]

    def sink_slot(self, i: int) -> int:
        return self._pair_rank[(i, self.n + 1)]

    def chain(self, e: ProvEdge) -> list[int]:
        """Provenance ids of e ordered along the path e.src -> e.dst."""
        legs = sorted((self.edge_by_id[i][0] for i in e.prov), key=lambda g: g.src)
        if len(legs) != len(e.prov):
            raise SlotMismatch(f"provenance {e.prov} not in root universe")
        at = e.src
        for leg in legs:
            if leg.src != at:
                raise BadProvenance(f"{e} breaks at vertex {at}")
            at = leg.dst
        if at != e.dst:
            raise BadProvenance(f"{e} ends at {at} instead of {e.dst}")
        return [leg.prov[0] for leg in legs]


@dataclass(frozen=True)
class Route:
    vertices: tuple[int, ...]
    slots: FlowVertex


def route_of_edge(e: ProvEdge, slots: SlotTable) -> Route:
    """The route entering at e.src, tracing e's provenance, exiting at e.dst."""
    ids = slots.chain(e)
    verts = [0, e.src]
    for i in ids:
        verts.append(slots.edge_by_id[i][0].dst)
    verts.append(slots.n + 1)
    cover = (
        {slots.source_slot(e.src), slots.sink_slot(e.dst)}
        | {slots.base_slot(i) for i in ids}
    )
    return Route(tuple(verts), frozenset(cover))


def trivial_route(i: int, slots: SlotTable) -> Route:
    return Route((0, i, slots.n + 1), frozenset({slots.source_slot(i), slots.sink_slot(i)}))


def routes(g: MultiGraph, slots: Optional[SlotTable] = None) -> list[Route]:
    """All routes of the augmented graph of g, in root coordinates.

    For the root graph itself this is the plain route enumeration; for a
    node deeper in a tree, base edges expand to their provenance chains.
    """
    slots = slots or SlotTable(g)
    out = []

    def extend(v: int, verts: tuple, cover: frozenset):
        out.append(Route(verts + (slots.n + 1,), cover | {slots.sink_slot(v)}))
        for e in g.outgoing(v):
            r = route_of_edge(e, slots)
            extend(e.dst, verts + r.vertices[2:-1], cover | (r.slots - {slots.source_slot(e.src), slots.sink_slot(e.dst)}))

    for i in range(1, g.n + 1):
        extend(i, (0, i), frozenset({slots.source_slot(i)}))
    return sorted(out, key=lambda r: (r.vertices, sorted(r.slots)))


def leaf_vertices(g: MultiGraph, slots: SlotTable) -> set[FlowVertex]:
    """The image of the edges-to-routes map: one unit-flow vertex per edge."""
    return {route_of_edge(e, slots).slots for e in g.edges}


def simplex_vertices(g: MultiGraph, slots: SlotTable) -> set[FlowVertex]:
    """Full vertex set of the (alternating) node's polytope: the edge routes
    together with the source-to-sink route through each base vertex."""
    verts = leaf_vertices(g, slots)
    verts.update(trivial_route(i, slots).slots for i in range(1, g.n + 1))
    return verts


def polytope_dim(vertices: Iterable[FlowVertex]) -> int:
    """Affine dimension of a set of 0/1 vertices, by exact rank."""
    verts = sorted(vertices, key=sorted)
    if not verts:
        return -1
    universe = sorted(set().union(*verts))
    idx = {s: k for k, s in enumerate(universe)}
    base = verts[0]
    rows = []
    for v in verts[1:]:
        row = [0] * len(universe)
        for s in v:
            row[idx[s]] += 1
        for s in base:
            row[idx[s]] -= 1
        rows.append(row)
    if not rows:
        return 0
    return exact_rank(rows)


def check_dim_formula(g: MultiGraph, slots: SlotTable) -> bool:
    """Augmented polytope of an alternating node: a simplex of dimension
    |E| + |V| - 1 on |E| + |V| affinely independent vertices."""
    verts = simplex_vertices(g, slots)
    want = len(g.edges) + g.n - 1
    return len(verts) == want + 1 and polytope_dim(verts) == want


def face_lp(
    vi: list[FlowVertex], vj: list[FlowVertex], common: set[FlowVertex]
) -> LPResult:
    """Maximize barycentric mass outside the common vertices subject to the
    point lying in both simplices; optimum 0 certifies a common face."""
    universe = sorted(set().union(*vi, *vj))
    p, q = len(vi), len(vj)
    seen = set()
    rows = []
    rhs = []
    for s in universe:
        row = tuple(
            [1 if s in v else 0 for v in vi] + [-1 if s in w else 0 for w in vj]
        )
        # slots covered by exactly the same vertices impose the same equation
        if row in seen or not any(row):
            continue
        seen.add(row)
        rows.append(list(row))
        rhs.append(0)
    rows.append([1] * p + [0] * q)
    rhs.append(1)
    rows.append([0] * p + [1] * q)
    rhs.append(1)
    cost = [0 if v in common else 1 for v in vi] + [0 if w in common else 1 for w in vj]
    return solve_lp(rows, rhs, cost)


@dataclass
class GeomReport:
    ok: bool
    scope_verified: bool
    checked_pairs: int = 0
    failures: list = field(default_factory=list)
    certificates: list = field(default_factory=list)

    def to_obj(self) -> dict:
        return {
            "ok": self.ok,
            "scope_verified": self.scope_verified,
            "checked_pairs": self.checked_pairs,
            "failures": self.failures,
            "certificates": self.certificates,
        }


def verify_triangulation(tree: ReductionTree, certificates: bool = False) -> GeomReport:
    """Pairwise face property of the full-dimensional leaf simplices.

    Checks, per pair: shared vertices = vertices of the graph intersection
    (the coordinate theorem at vertex level), the dimension formula for the
    intersection, and the exact-LP face certificate.  Also checks each leaf
    is a simplex and the triple-wise monotonicity of intersections.
    """
    report = GeomReport(ok=True, scope_verified=tree.is_order_O)
    slots = SlotTable(tree.root.graph)
    leaves = full_dim_leaves_dfs(tree.root)
    vsets = []
    for leaf in leaves:
        verts = simplex_vertices(leaf.graph, slots)
        vsets.append(sorted(verts, key=sorted))
        if not check_dim_formula(leaf.graph, slots):
            report.ok = False
            report.failures.append({"leaf": leaf.path, "clause": "simplex-dimension"})
    inter_cache = {}
    for i in range(len(leaves)):
        for j in range(i):
            vi, vj = vsets[i], vsets[j]
            common = set(vi) & set(vj)
            inter = graph_intersection(leaves[i].graph, leaves[j].graph)
            inter_cache[(i, j)] = (common, inter)
            report.checked_pairs += 1
            expected = simplex_vertices(inter, slots)
            if common != expected:
                report.ok = False
                report.failures.append(
                    {"pair": [leaves[j].path, leaves[i].path], "clause": "vertex-intersection"}
                )
                continue
            want_dim = len(inter.edges) + inter.n - 1
            if polytope_dim(common) != want_dim:
                report.ok = False
                report.failures.append(
                    {"pair": [leaves[j].path, leaves[i].path], "clause": "intersection-dimension"}
                )
            res = face_lp(vi, vj, common)
            verdict = res.status == "optimal" and res.value == 0
            if certificates:
                report.certificates.append(
                    {
                        "pair": [leaves[j].path, leaves[i].path],
                        "shared_vertices": len(common),
                        "lp_optimum": str(res.value) if res.value is not None else res.status,
                        "verdict": "face" if verdict else "violation",
                    }
                )
            if not verdict:
                report.ok = False
                report.failures.append(
                    {
                        "pair": [leaves[j].path, leaves[i].path],
                        "clause": "face-certificate",
                        "lp": res.status,
                        "optimum": str(res.value),
                    }
                )
    # monotone intersections: containment of graphs forces containment of faces
    for i in range(len(leaves)):
        for j in range(i):
            for k in range(i):
                if j == k:
                    continue
                cj, gj = inter_cache[(i, j)]
                ck, gk = inter_cache[(i, k)]
                if not (gj.edge_counter() - gk.edge_counter()):
                    if not set(cj) <= set(ck):
                        report.ok = False
                        report.failures.append(
                            {
                                "triple": [leaves[i].path, leaves[j].path, leaves[k].path],
                                "clause": "subset-monotonicity",
                            }
                        )
    return report


def verify_shelling(tree: ReductionTree) -> GeomReport:
    """Depth-first leaf order as a shelling: every simplex meets the union
    of its predecessors in a nonempty union of its facets.

    Cross-checks the attachment facets against the preceding facets of the
    leaf in the reduction tree.
    """
    from .redtree import preceding_facets

    report = GeomReport(ok=True, scope_verified=tree.is_order_O)
    slots = SlotTable(tree.root.graph)
    leaves = full_dim_leaves_dfs(tree.root)
    vsets = [simplex_vertices(l.graph, slots) for l in leaves]
    route_to_edge = [
        {route_of_edge(e, slots).slots: e for e in l.graph.edges} for l in leaves
    ]
    attach_counts = []
    for i, leaf in enumerate(leaves):
        inters = [frozenset(vsets[i] & vsets[j]) for j in range(i)]
        report.checked_pairs += len(inters)
        facet_size = len(vsets[i]) - 1
        maximal = {f for f in inters if len(f) == facet_size}
        if i > 0:
            if not maximal:
                report.ok = False
                report.failures.append({"leaf": leaf.path, "clause": "no-facet-attachment"})
                attach_counts.append(0)
                continue
            stray = [f for f in inters if not any(f <= m for m in maximal)]
            if stray:
                report.ok = False
                report.failures.append(
                    {"leaf": leaf.path, "clause": "low-dimensional-attachment",
                     "stray_faces": len(stray)}
                )
        attach_counts.append(len(maximal))
        # the missing vertex of each attachment facet is an edge route;
        # dropping that edge must reproduce the preceding facets exactly
        got = Counter()
        for f in maximal:
            (missing,) = set(vsets[i]) - f
            edge = route_to_edge[i].get(missing)
            if edge is None:
                report.ok = False
                report.failures.append(
                    {"leaf": leaf.path, "clause": "attachment-misses-trivial-route"}
                )
                continue
            got[leaf.graph.without(edge)] += 1
        want = Counter(h.graph for h in preceding_facets(tree.root, leaf))
        if got != want:
            report.ok = False
            report.failures.append(
                {"leaf": leaf.path, "clause": "attachment-vs-preceding-facets",
                 "geometric": len(got), "combinatorial": len(want)}
            )
    report.certificates.append({"attach_counts": attach_counts})
    return report


def check_reduction_cover(tree: ReductionTree) -> tuple[bool, Optional[dict]]:
    """Vertex-level split at every internal node: the node's route set is the
    union of the left and right children's, and the middle child's is their
    intersection."""
    slots = SlotTable(tree.root.graph)
    cache: dict = {}

    def route_set(node: TreeNode) -> frozenset:
        if id(node) not in cache:
            cache[id(node)] = frozenset(r.slots for r in routes(node.graph, slots))
        return cache[id(node)]

    for node in iter_nodes(tree.root):
        if node.is_leaf:
            continue
        whole = route_set(node)
        left, mid, right = node.children
        lv, mv, rv = route_set(left), route_set(mid), route_set(right)
        if whole != lv | rv or mv != lv & rv:
            return False, {"node": node.path, "clause": "route-split"}
    return True, None
