"""Synthetic and demo graph generators for tests, benchmarks, and the CLI."""

from __future__ import annotations

import numpy as np

from .model import Graph, graph_from_triples


def demo_graph() -> Graph:
    """Small bibliography-style fixture: authors, articles, venues.

    Includes several same-surname authors so keyword search has something
    interesting to chew on, and a hub author for focus-mode demos.
    """
    authors = {
        1: "Christos Faloutsos",
        2: "Michalis Faloutsos",
        3: "Petros Faloutsos",
        4: "Jia Wei",
        5: "Ana Costa",
        6: "Sofia Marino",
    }
    articles = {
        10: "On Power-Law Relationships of the Internet Topology",
        11: "Graphs over Time: Densification and Shrinking Diameters",
        12: "Sampling from Large Graphs",
        13: "Fast Subgraph Matching at Scale",
        14: "Streaming Triangle Counting",
    }
    venues = {20: "SIGCOMM", 21: "KDD", 22: "VLDB"}
    triples = []

    def add(src, elab, dst, nodes_a, nodes_b):
        triples.append((src, nodes_a[src], elab, dst, nodes_b[dst]))

    has_author = [
        (10, 1), (10, 2), (10, 3),
        (11, 1), (11, 4),
        (12, 1), (12, 5),
        (13, 4), (13, 6),
        (14, 5), (14, 6),
    ]
    for art, auth in has_author:
        add(art, "has-author", auth, articles, authors)
    published_in = [(10, 20), (11, 21), (12, 21), (13, 22), (14, 22)]
    for art, ven in published_in:
        add(art, "published-in", ven, articles, venues)
    cites = [(11, 10), (12, 10), (12, 11), (13, 11), (14, 12), (14, 13)]
    for a, b in cites:
        add(a, "cites", b, articles, articles)
    return graph_from_triples(triples)


def random_graph(n_nodes: int, n_edges: int, seed: int = 0, edge_label_pool=("link", "ref", "cites")) -> Graph:
    """Uniform random endpoints; every node appears (degree >= 1 not enforced)."""
    rng = np.random.default_rng(seed)
    src = rng.integers(0, n_nodes, n_edges)
    dst = rng.integers(0, n_nodes, n_edges)
    labels = tuple(f"n{i}" for i in range(n_nodes))
    e_labels = tuple(edge_label_pool[int(i)] for i in rng.integers(0, len(edge_label_pool), n_edges))
    return Graph(
        np.arange(n_nodes, dtype=np.uint64), labels,
        src.astype(np.uint64), dst.astype(np.uint64), e_labels,
    )


def connected_random_graph(n_nodes: int, n_edges: int, seed: int = 0) -> Graph:
    """Random graph with a spanning backbone, so no node is isolated."""
    if n_edges < n_nodes - 1:
        raise ValueError("need at least n_nodes - 1 edges")
    rng = np.random.default_rng(seed)
    order = rng.permutation(n_nodes)
    b_src = order[:-1]
    b_dst = order[1:]
    extra = n_edges - (n_nodes - 1)
    src = np.concatenate([b_src, rng.integers(0, n_nodes, extra)])
    dst = np.concatenate([b_dst, rng.integers(0, n_nodes, extra)])
    labels = tuple(f"n{i}" for i in range(n_nodes))
    e_labels = tuple(("link", "ref", "cites")[int(i)] for i in rng.integers(0, 3, n_edges))
    return Graph(
        np.arange(n_nodes, dtype=np.uint64), labels,
        src.astype(np.uint64), dst.astype(np.uint64), e_labels,
    )


def grid_graph(rows: int, cols: int) -> Graph:
    """Lattice with row-major node ids and right/down neighbor edges.

    Laid out with the grid algorithm at matching column count, edges are
    uniformly short, which makes window-query results scale ~linearly
    with window area.
    """
    n = rows * cols
    i = np.arange(n)
    right_ok = (i % cols) < cols - 1
    down_ok = i < n - cols
    src = np.concatenate([i[right_ok], i[down_ok]])
    dst = np.concatenate([i[right_ok] + 1, i[down_ok] + cols])
    labels = tuple(f"n{k}" for k in range(n))
    return Graph(
        np.arange(n, dtype=np.uint64), labels,
        src.astype(np.uint64), dst.astype(np.uint64),
        tuple("adj" for _ in range(src.shape[0])),
    )
