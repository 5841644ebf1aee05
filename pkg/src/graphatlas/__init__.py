"""graphatlas: explore very large labeled graphs like a multi-level map.

Offline, the pipeline partitions the graph, lays out each partition,
arranges partitions on a shared plane, derives abstraction layers under a
ranking criterion, and indexes everything into a single store file.
Online, a small HTTP service answers window, keyword, and focus queries
against that store.
"""

from .abstraction import (
    AbstractionCriterion, Layer, build_hierarchy, build_layer,
    degree_scores, hits, pagerank,
)
from .arrange import CrossingEdge, GlobalLayout, arrange, count_crossing_edges, placement_cost
from .errors import GraphAtlasError
from .layout import LayoutAlgorithm, LocalLayout, layout_partition
from .model import (
    Graph, GraphStats, graph_stats, parse_edge_list, parse_ntriples_subset,
    serialize_edge_list,
)
from .partition import PartitionAssignment, PartitionConfig, edge_cut, partition
from .pipeline import preprocess, preprocess_graph
from .service import create_app, effective_window, focus_window, serve
from .store import Store, TripleRow, build_store

__version__ = "0.1.0"

__all__ = [
    "AbstractionCriterion", "CrossingEdge", "GlobalLayout", "Graph", "GraphStats",
    "GraphAtlasError", "Layer", "LayoutAlgorithm", "LocalLayout",
    "PartitionAssignment", "PartitionConfig", "Store", "TripleRow",
    "arrange", "build_hierarchy", "build_layer", "build_store",
    "count_crossing_edges", "create_app", "degree_scores", "edge_cut",
    "effective_window", "focus_window", "graph_stats", "hits",
    "layout_partition", "pagerank", "parse_edge_list", "parse_ntriples_subset",
    "partition", "placement_cost", "preprocess", "preprocess_graph",
    "serialize_edge_list", "serve",
]
