"""Reduction trees: full and partial, with pluggable deterministic strategies.

A tree node either is a leaf or has exactly three children, in the planar
order left (keep first edge), middle (keep neither), right (keep second
edge).  Depth-first search therefore visits children as L, M, R, and a
node is addressed by its branch string, e.g. "RML".

A strategy maps (graph, branch string) to the edge pair to reduce next,
or None to stop; None at every reachable node yields a partial tree.
The order-O strategy always reduces to completion, so its leaves are
exactly the alternating graphs.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

from .multigraph import (
    MultiGraph,
    ProvEdge,
    graph_intersection,
    graph_to_obj,
    next_reduction_O,
    reduce,
    reducible_pairs,
)

DEFAULT_NODE_BUDGET = 10**6

BRANCHES = "LMR"


class DepthExceeded(RuntimeError):
    """The node budget ran out while expanding a tree."""


class NotFullDim(ValueError):
    """Operation requires a full-dimensional leaf."""


@dataclass(eq=False)
class TreeNode:
    """Identity object: two nodes are the same only if they are the same node."""

    graph: MultiGraph
    path: str = ""
    pair: Optional[tuple[ProvEdge, ProvEdge]] = None
    children: Optional[tuple["TreeNode", "TreeNode", "TreeNode"]] = None

    @property
    def is_leaf(self) -> bool:
        return self.children is None

    @property
    def branch(self) -> str:
        return self.path[-1] if self.path else ""


Strategy = Callable[[MultiGraph, str], Optional[tuple[ProvEdge, ProvEdge]]]


def order_O_strategy(g: MultiGraph, path: str) -> Optional[tuple[ProvEdge, ProvEdge]]:
    return next_reduction_O(g)


class RandomStrategy:
    """Reduce a uniformly random reducible pair; deterministic per (seed, path)."""

    def __init__(self, seed: int):
        self.seed = seed

    def __call__(self, g: MultiGraph, path: str):
        pairs = reducible_pairs(g)
        if not pairs:
            return None
        rng = random.Random(f"{self.seed}:{path}")
        return pairs[rng.randrange(len(pairs))]

    @property
    def name(self) -> str:
        return f"random({self.seed})"


class ReplayStrategy:
    """Replays a recorded step list; steps are keyed by branch string."""

    def __init__(self, steps: dict[str, tuple[int, int, int, int, int]]):
        self.steps = dict(steps)

    def __call__(self, g: MultiGraph, path: str):
        step = self.steps.get(path)
        if step is None:
            return None
        i, j, k, ci, cj = step
        ins = [e for e in g.edges if (e.src, e.dst) == (i, j)]
        outs = [e for e in g.edges if (e.src, e.dst) == (j, k)]
        if ci >= len(ins) or cj >= len(outs):
            raise ValueError(f"replay step {step} at {path!r} has no matching edges")
        return ins[ci], outs[cj]

    @property
    def name(self) -> str:
        return "replay"


@dataclass
class ReductionTree:
    root: TreeNode
    strategy_name: str
    node_count: int
    _embed_cache: dict = field(default_factory=dict, repr=False)

    @property
    def is_order_O(self) -> bool:
        return self.strategy_name == "orderO"


def build_tree(
    g: MultiGraph,
    strategy: Strategy = order_O_strategy,
    name: Optional[str] = None,
    budget: int = DEFAULT_NODE_BUDGET,
) -> ReductionTree:
    if name is None:
        name = getattr(strategy, "name", None) or (
            "orderO" if strategy is order_O_strategy else "custom"
        )
    root = TreeNode(graph=g)
    count = 1
    stack = [root]
    while stack:
        node = stack.pop()
        pair = strategy(node.graph, node.path)
        if pair is None:
            continue
        g1, g2, g3 = reduce(node.graph, *pair)
        count += 3
        if count > budget:
            raise DepthExceeded(f"node budget {budget} exhausted")
        node.pair = pair
        kids = (
            TreeNode(g1, node.path + "L"),
            TreeNode(g3, node.path + "M"),
            TreeNode(g2, node.path + "R"),
        )
        node.children = kids
        # push right-to-left so DFS-ordered work, though order is immaterial here
        stack.extend(reversed(kids))
    return ReductionTree(root=root, strategy_name=name, node_count=count)


def iter_nodes(root: TreeNode) -> Iterator[TreeNode]:
    stack = [root]
    while stack:
        node = stack.pop()
        yield node
        if node.children:
            stack.extend(reversed(node.children))


def leaves_dfs(root: TreeNode) -> list[TreeNode]:
    return [node for node in iter_nodes(root) if node.is_leaf]


def full_dim_leaves_dfs(root: TreeNode) -> list[TreeNode]:
    m = len(root.graph.edges)
    return [leaf for leaf in leaves_dfs(root) if len(leaf.graph.edges) == m]


def depth(root: TreeNode) -> int:
    if root.is_leaf:
        return 0
    return 1 + max(depth(c) for c in root.children)


def node_at(root: TreeNode, path: str) -> TreeNode:
    node = root
    for ch in path:
        if node.children is None:
            raise ValueError(f"path {path!r} walks past a leaf")
        node = node.children[BRANCHES.index(ch)]
    return node


def descend_nodes(root: TreeNode, leaf: TreeNode) -> list[TreeNode]:
    """Nodes from root to leaf inclusive, following the leaf's branch string."""
    rel = relative_path(root, leaf)
    out = [root]
    for ch in rel:
        out.append(out[-1].children[BRANCHES.index(ch)])
    return out


def relative_path(root: TreeNode, node: TreeNode) -> str:
    if not node.path.startswith(root.path):
        raise ValueError(f"{node.path!r} is not below {root.path!r}")
    return node.path[len(root.path):]


def middle_steps(root: TreeNode, leaf: TreeNode) -> list[TreeNode]:
    """Internal nodes on the root->leaf path whose M child the path enters."""
    chain = descend_nodes(root, leaf)
    rel = relative_path(root, leaf)
    return [chain[i] for i, ch in enumerate(rel) if ch == "M"]


def _contains_with_one_less(small: Counter, big: Counter) -> bool:
    return not (small - big)


def preceding_facets(root: TreeNode, leaf: TreeNode) -> list[TreeNode]:
    """Leaves H before the full-dimensional leaf in DFS order with E(H) one
    edge short of E(leaf), reachable by up-steps then down-steps where the
    first down-step enters a middle child."""
    if len(leaf.graph.edges) != len(root.graph.edges):
        raise NotFullDim(f"leaf at {leaf.path!r} is not full dimensional")
    lrel = relative_path(root, leaf)
    lcnt = leaf.graph.edge_counter()
    out = []
    for h in leaves_dfs(root):
        hrel = relative_path(root, h)
        if hrel >= lrel:  # branch strings sort as L < M < R, matching DFS order
            continue
        if len(h.graph.edges) != len(leaf.graph.edges) - 1:
            continue
        if not _contains_with_one_less(h.graph.edge_counter(), lcnt):
            continue
        split = 0
        while split < min(len(hrel), len(lrel)) and hrel[split] == lrel[split]:
            split += 1
        if split < len(hrel) and hrel[split] == "M":
            out.append(h)
    return out


def formal_leaf_sum(root: TreeNode) -> Counter:
    """Expand sum_i prod_j (F_i + Q_j^i) with graph product = intersection.

    Q_j^i runs over the preceding facets of the i-th full-dimensional leaf;
    the empty product stands for F_i itself.  Returns a multiset of graphs.
    """
    total: Counter = Counter()
    for leaf in full_dim_leaves_dfs(root):
        facets = [h.graph for h in preceding_facets(root, leaf)]
        terms = [leaf.graph]
        for q in facets:
            # multiply the running expansion by (F + Q): F absorbs into every
            # previous factor choice, so each term t splits into t and t cap Q
            terms = terms + [graph_intersection(t, q) for t in terms]
        total.update(terms)
    return total


def check_leaf_sum_identity(root: TreeNode) -> tuple[bool, Optional[dict]]:
    expanded = formal_leaf_sum(root)
    actual = Counter(leaf.graph for leaf in leaves_dfs(root))
    if expanded == actual:
        return True, None
    diff = {}
    for g in set(expanded) | set(actual):
        if expanded[g] != actual[g]:
            diff[g] = (expanded[g], actual[g])
    return False, {"mismatches": diff}


def leaf_census(root: TreeNode) -> Counter:
    """Multiset of edge counts over the leaves."""
    return Counter(len(leaf.graph.edges) for leaf in leaves_dfs(root))


def record_steps(tree: ReductionTree) -> list[dict]:
    """Serialize the reductions as replayable (path, i, j, k, copy, copy) steps."""
    steps = []
    for node in iter_nodes(tree.root):
        if node.is_leaf:
            continue
        a, b = node.pair
        ins = [e for e in node.graph.edges if e.ends == a.ends]
        outs = [e for e in node.graph.edges if e.ends == b.ends]
        steps.append(
            {
                "at": node.path,
                "i": a.src,
                "j": a.dst,
                "k": b.dst,
                "ci": ins.index(a),
                "cj": outs.index(b),
            }
        )
    return steps


def strategy_from_steps(steps: list[dict]) -> ReplayStrategy:
    table = {
        s["at"]: (s["i"], s["j"], s["k"], s.get("ci", 0), s.get("cj", 0)) for s in steps
    }
    return ReplayStrategy(table)


def tree_to_obj(tree: ReductionTree) -> dict:
    def node_obj(node: TreeNode) -> dict:
        obj = {"graph": graph_to_obj(node.graph, with_prov=True)}
        if node.path:
            obj["branch"] = node.branch
        if not node.is_leaf:
            a, b = node.pair
            ins = [e for e in node.graph.edges if e.ends == a.ends]
            outs = [e for e in node.graph.edges if e.ends == b.ends]
            obj["step"] = {
                "i": a.src,
                "j": a.dst,
                "k": b.dst,
                "ci": ins.index(a),
                "cj": outs.index(b),
            }
            obj["children"] = [node_obj(c) for c in node.children]
        return obj

    leaves = [
        {"dfs_index": idx, "path": leaf.path, "graph": graph_to_obj(leaf.graph, with_prov=True)}
        for idx, leaf in enumerate(leaves_dfs(tree.root))
    ]
    return {
        "strategy": tree.strategy_name,
        "node_count": tree.node_count,
        "root": node_obj(tree.root),
        "leaves": leaves,
    }
