import numpy as np
import pytest

from graphatlas.abstraction import Layer
from graphatlas.model import Graph


def make_graph(n, edges, directed=True, labels=None, edge_labels=None):
    """Graph over node ids 0..n-1 from a list of (src, dst) pairs."""
    labels = labels or tuple(chr(ord("a") + i) if n <= 26 else f"n{i}" for i in range(n))
    edge_labels = edge_labels or tuple("e" for _ in edges)
    src = np.asarray([e[0] for e in edges], np.uint64)
    dst = np.asarray([e[1] for e in edges], np.uint64)
    return Graph(np.arange(n, dtype=np.uint64), tuple(labels), src, dst, tuple(edge_labels), directed)


def two_triangle_bridge():
    """Two triangles {0,1,2} and {3,4,5} joined by the single edge 2-3."""
    return make_graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])


def path_graph(n):
    return make_graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n):
    return make_graph(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(leaves):
    """Node 0 is the hub; edges point leaf -> hub."""
    return make_graph(leaves + 1, [(i, 0) for i in range(1, leaves + 1)])


def random_small_graph(rng, max_nodes=12, max_edges=30, ensure_edges=True):
    n = int(rng.integers(2, max_nodes + 1))
    m = int(rng.integers(1 if ensure_edges else 0, max_edges + 1))
    edges = [(int(rng.integers(n)), int(rng.integers(n))) for _ in range(m)]
    return make_graph(n, edges)


def make_layer(g, xy=None, index=0, rng=None):
    if xy is None:
        rng = rng or np.random.default_rng(0)
        xy = rng.uniform(-500, 500, size=(g.node_count, 2))
    return Layer(index, g, np.asarray(xy, np.float64), None)


@pytest.fixture(scope="session")
def demo_store():
    from graphatlas import preprocess_graph, synth

    store, _ = preprocess_graph(
        synth.demo_graph(), partitions=2, layers=3, criterion="pagerank",
        iterations=60, dataset="demo",
    )
    return store
