"""Multigraphs with edge provenance and the subdivision-algebra reduction move.

All graphs live on the vertex set [n] (1-based), every edge runs from its
smaller endpoint to its larger one, and parallel edges are allowed.  Each
edge carries a *provenance*: the multiset of root-edge ids it is a formal
sum of.  Two edges are equal only when endpoints AND provenance agree;
this is what makes intersections of graphs sitting in the same reduction
tree well defined.

The reduction move on edges (i,j),(j,k) with i<j<k produces three graphs:

    G1 = G - (j,k) + (i,k)      "left"   (keep the first edge)
    G2 = G - (i,j) + (i,k)      "right"  (keep the second edge)
    G3 = G - (i,j) - (j,k) + (i,k)  "middle"

where the new edge (i,k) is the formal sum of the two reduced edges.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence


class NotComposable(ValueError):
    """The two edges do not meet head-to-tail as (i,j),(j,k) with i<j<k."""


class EdgeAbsent(ValueError):
    """An edge handed to reduce() is not present in the graph."""


class RootMismatch(ValueError):
    """The two graphs do not live over the same root universe."""


@dataclass(frozen=True, order=True)
class ProvEdge:
    """A directed edge (src < dst) tagged with the sorted multiset of root ids."""

    src: int
    dst: int
    prov: tuple[int, ...]

    def __post_init__(self):
        if self.src >= self.dst:
            raise ValueError(f"loop or reversed edge ({self.src},{self.dst})")
        if not self.prov:
            raise ValueError("edge needs a nonempty provenance")
        if any(self.prov[i] > self.prov[i + 1] for i in range(len(self.prov) - 1)):
            object.__setattr__(self, "prov", tuple(sorted(self.prov)))

    @property
    def ends(self) -> tuple[int, int]:
        return (self.src, self.dst)


@dataclass(frozen=True)
class MultiGraph:
    """Vertex count plus a canonically sorted multiset of provenance edges."""

    n: int
    edges: tuple[ProvEdge, ...]

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(sorted(self.edges)))
        for e in self.edges:
            if not (1 <= e.src < e.dst <= self.n):
                raise ValueError(f"edge {e.ends} out of range for n={self.n}")

    def edge_counter(self) -> Counter:
        return Counter(self.edges)

    def incoming(self, v: int) -> list[ProvEdge]:
        return [e for e in self.edges if e.dst == v]

    def outgoing(self, v: int) -> list[ProvEdge]:
        return [e for e in self.edges if e.src == v]

    def count_edges(self, src: int, dst: int) -> int:
        return sum(1 for e in self.edges if e.src == src and e.dst == dst)

    def without(self, *drop: ProvEdge) -> "MultiGraph":
        cnt = Counter(self.edges)
        cnt.subtract(Counter(drop))
        if any(c < 0 for c in cnt.values()):
            raise EdgeAbsent(f"cannot remove {drop}")
        return MultiGraph(self.n, tuple(cnt.elements()))

    def plus(self, *add: ProvEdge) -> "MultiGraph":
        return MultiGraph(self.n, self.edges + tuple(add))


def graph(n: int, pairs: Iterable[tuple[int, int]]) -> MultiGraph:
    """Build a root graph; ids are 1-based positions after canonical sorting."""
    sorted_pairs = sorted(tuple(p) for p in pairs)
    edges = [ProvEdge(i, j, (k,)) for k, (i, j) in enumerate(sorted_pairs, start=1)]
    return MultiGraph(n, tuple(edges))


def path_graph(n: int) -> MultiGraph:
    return graph(n, [(i, i + 1) for i in range(1, n)])


def complete_graph(n: int) -> MultiGraph:
    return graph(n, [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)])


def merge_edge(a: ProvEdge, b: ProvEdge) -> ProvEdge:
    """The formal sum a+b spanning (a.src, b.dst)."""
    return ProvEdge(a.src, b.dst, tuple(sorted(a.prov + b.prov)))


def reduce(g: MultiGraph, a: ProvEdge, b: ProvEdge) -> tuple[MultiGraph, MultiGraph, MultiGraph]:
    """Perform the reduction on edges a=(i,j), b=(j,k); returns (G1, G2, G3)."""
    if a.dst != b.src or not (a.src < a.dst < b.dst):
        raise NotComposable(f"{a.ends} then {b.ends}")
    cnt = g.edge_counter()
    if cnt[a] == 0:
        raise EdgeAbsent(f"{a} not in graph")
    if cnt[b] == 0:
        raise EdgeAbsent(f"{b} not in graph")
    new = merge_edge(a, b)
    g1 = g.without(b).plus(new)
    g2 = g.without(a).plus(new)
    g3 = g.without(a, b).plus(new)
    return g1, g2, g3


def is_alternating(g: MultiGraph, v: int) -> bool:
    """A vertex is alternating unless it has both an incoming and an outgoing edge."""
    if not (1 <= v <= g.n):
        raise ValueError(f"vertex {v} out of range")
    has_in = any(e.dst == v for e in g.edges)
    has_out = any(e.src == v for e in g.edges)
    return not (has_in and has_out)


def is_alternating_graph(g: MultiGraph) -> bool:
    return all(is_alternating(g, v) for v in range(1, g.n + 1))


def next_reduction_O(g: MultiGraph) -> Optional[tuple[ProvEdge, ProvEdge]]:
    """The order-O selector: topmost edge pair at the smallest nonalternating vertex.

    Topmost means the incoming edge with minimal source and the outgoing edge
    with maximal target.  Among parallel copies the one with lexicographically
    smallest provenance wins, so the selector is a pure function of the graph.
    """
    for v in range(1, g.n + 1):
        ins = g.incoming(v)
        outs = g.outgoing(v)
        if not ins or not outs:
            continue
        a = min(ins, key=lambda e: (e.src, e.prov))
        top = max(e.dst for e in outs)
        b = min((e for e in outs if e.dst == top), key=lambda e: e.prov)
        return a, b
    return None


def reducible_pairs(g: MultiGraph) -> list[tuple[ProvEdge, ProvEdge]]:
    """All head-to-tail edge pairs, in canonical order."""
    pairs = []
    for v in range(1, g.n + 1):
        for a in g.incoming(v):
            for b in g.outgoing(v):
                pairs.append((a, b))
    return sorted(pairs)


def graph_intersection(g1: MultiGraph, g2: MultiGraph) -> MultiGraph:
    """Multiset intersection of edges under provenance-aware equality."""
    if g1.n != g2.n:
        raise RootMismatch(f"vertex counts differ: {g1.n} vs {g2.n}")
    common = g1.edge_counter() & g2.edge_counter()
    return MultiGraph(g1.n, tuple(common.elements()))


def is_derived_from(e: ProvEdge, b_id: int) -> bool:
    return b_id in e.prov


def is_derived_from_sum(e: ProvEdge, a_id: int, b_id: int) -> bool:
    return a_id in e.prov and b_id in e.prov


def derived_from_edge(e: ProvEdge, b: ProvEdge) -> bool:
    """Whether e is a formal sum involving all of b (a b*-edge)."""
    return not Counter(b.prov) - Counter(e.prov)


def derived_from_sum_edges(e: ProvEdge, a: ProvEdge, b: ProvEdge) -> bool:
    return not (Counter(a.prov) + Counter(b.prov)) - Counter(e.prov)


def graph_to_obj(g: MultiGraph, with_prov: bool = False):
    if with_prov:
        return {"n": g.n, "edges": [[e.src, e.dst, list(e.prov)] for e in g.edges]}
    return {"n": g.n, "edges": [[e.src, e.dst] for e in g.edges]}


def graph_from_obj(obj) -> MultiGraph:
    """Parse the graph JSON schema {"n": int, "edges": [[i,j], ...]}."""
    try:
        n = int(obj["n"])
        pairs = [(int(i), int(j)) for i, j in obj["edges"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"bad graph object: {exc}") from exc
    return graph(n, pairs)
