"""redforge: exact reduction trees, reduced forms, and flow-polytope checks."""

from .multigraph import (
    MultiGraph,
    ProvEdge,
    complete_graph,
    graph,
    graph_intersection,
    is_alternating_graph,
    next_reduction_O,
    path_graph,
    reduce,
)

__all__ = [
    "MultiGraph",
    "ProvEdge",
    "graph",
    "path_graph",
    "complete_graph",
    "reduce",
    "next_reduction_O",
    "is_alternating_graph",
    "graph_intersection",
]
