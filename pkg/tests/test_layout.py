import math

import numpy as np
import pytest

from graphatlas.errors import ConfigError, LayoutError
from graphatlas.layout import CIRCULAR, FORCE_DIRECTED, GRID, LayoutAlgorithm, layout_partition

from conftest import make_graph, path_graph, random_small_graph


@pytest.mark.parametrize("kind", [FORCE_DIRECTED, CIRCULAR, GRID])
def test_single_node_at_origin(kind):
    lay = layout_partition(make_graph(1, []), LayoutAlgorithm(kind), seed=4)
    assert lay.position_of(0) == (0.0, 0.0)
    assert lay.bbox == (-20.0, -20.0, 20.0, 20.0)


def test_circular_four_nodes_equal_spacing():
    g = make_graph(4, [(0, 1)])
    lay = layout_partition(g, LayoutAlgorithm(CIRCULAR))
    pts = [np.asarray(lay.position_of(i)) for i in range(4)]
    dists = [np.linalg.norm(pts[i] - pts[(i + 1) % 4]) for i in range(4)]
    assert max(dists) - min(dists) < 1e-9
    radius = LayoutAlgorithm().ideal_edge_length * 4 / (2 * math.pi)
    for p in pts:
        assert np.linalg.norm(p) == pytest.approx(radius, abs=1e-9)


def test_force_pair_settles_near_ideal_length():
    g = make_graph(2, [(0, 1)])
    alg = LayoutAlgorithm(FORCE_DIRECTED, iterations=300, ideal_edge_length=60.0)
    lay = layout_partition(g, alg, seed=1)
    d = math.dist(lay.position_of(0), lay.position_of(1))
    # equilibrium of the attract/repel pair is exactly the ideal length
    assert abs(d - 60.0) <= 0.25 * 60.0


def test_grid_row_major_spacing():
    g = make_graph(9, [])
    lay = layout_partition(g, LayoutAlgorithm(GRID, ideal_edge_length=10.0))
    p0 = np.asarray(lay.position_of(0))
    p1 = np.asarray(lay.position_of(1))
    p3 = np.asarray(lay.position_of(3))
    assert np.allclose(p1 - p0, [10.0, 0.0])
    assert np.allclose(p3 - p0, [0.0, 10.0])


def test_positions_finite_even_for_messy_graphs():
    rng = np.random.default_rng(0)
    for _ in range(20):
        g = random_small_graph(rng, max_nodes=15, max_edges=25, ensure_edges=False)
        lay = layout_partition(g, LayoutAlgorithm(iterations=40), seed=int(rng.integers(100)))
        assert np.isfinite(lay.xy).all()


def test_bbox_contains_positions_with_margin():
    rng = np.random.default_rng(5)
    g = random_small_graph(rng, max_nodes=20, max_edges=30)
    lay = layout_partition(g, LayoutAlgorithm(iterations=50), seed=2, margin=7.5)
    x1, y1, x2, y2 = lay.bbox
    assert (lay.xy[:, 0] >= x1 + 7.5 - 1e-9).all() and (lay.xy[:, 0] <= x2 - 7.5 + 1e-9).all()
    assert (lay.xy[:, 1] >= y1 + 7.5 - 1e-9).all() and (lay.xy[:, 1] <= y2 - 7.5 + 1e-9).all()


def test_bitwise_determinism():
    g = random_small_graph(np.random.default_rng(8), max_nodes=20, max_edges=40)
    alg = LayoutAlgorithm(iterations=80)
    a = layout_partition(g, alg, seed=12)
    b = layout_partition(g, alg, seed=12)
    assert np.array_equal(a.xy, b.xy)


def test_translate_shifts_bbox():
    g = path_graph(5)
    lay = layout_partition(g, LayoutAlgorithm(GRID))
    moved = lay.translate(100.0, -50.0)
    assert np.allclose(
        np.asarray(moved.bbox),
        np.asarray(lay.bbox) + [100.0, -50.0, 100.0, -50.0],
    )


def test_disconnected_components_do_not_overlap():
    g = make_graph(6, [(0, 1), (1, 2), (3, 4), (4, 5)])
    lay = layout_partition(g, LayoutAlgorithm(iterations=60), seed=3)
    left = {0, 1, 2} if lay.xy[0, 0] < lay.xy[3, 0] else {3, 4, 5}
    right = set(range(6)) - left
    assert max(lay.xy[list(left), 0]) < min(lay.xy[list(right), 0])


def test_empty_subgraph_rejected():
    from graphatlas.model import parse_edge_list

    with pytest.raises(LayoutError):
        layout_partition(parse_edge_list(""), LayoutAlgorithm())


def test_bad_algorithm_config():
    with pytest.raises(ConfigError):
        LayoutAlgorithm("spiral")
    with pytest.raises(ConfigError):
        LayoutAlgorithm(iterations=0)
