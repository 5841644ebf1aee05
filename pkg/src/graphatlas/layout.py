"""Per-partition layout: assigns pixel coordinates to one sub-graph.

Edges crossing into other partitions are not visible here; the arranger
(arrange.py) deals with those. Every layout is deterministic per seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from .adjacency import combined_pairs, connected_components, csr_from_pairs
from .errors import ConfigError, LayoutError
from .model import Graph

FORCE_DIRECTED = "force_directed"
CIRCULAR = "circular"
GRID = "grid"
_KINDS = (FORCE_DIRECTED, CIRCULAR, GRID)

# all-pairs repulsion up to this size; beyond it only pairs within
# 3*ideal_edge_length interact (grid binning / KD-tree)
_EXACT_REPULSION_MAX = 2048


@dataclass(frozen=True)
class LayoutAlgorithm:
    kind: str = FORCE_DIRECTED
    iterations: int = 300
    ideal_edge_length: float = 60.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ConfigError(f"unknown layout kind {self.kind!r}")
        if self.iterations < 1:
            raise ConfigError("iterations must be >= 1")
        if self.ideal_edge_length <= 0:
            raise ConfigError("ideal_edge_length must be positive")


@dataclass(frozen=True)
class LocalLayout:
    """Coordinates for one partition, in partition-local pixels."""

    node_ids: np.ndarray          # uint64
    xy: np.ndarray                # float64 (n, 2)
    margin: float = 20.0

    def __post_init__(self):
        object.__setattr__(self, "xy", np.ascontiguousarray(self.xy, dtype=np.float64))

    @cached_property
    def bbox(self) -> tuple[float, float, float, float]:
        """Tight bounding box of the positions, padded by `margin`."""
        return (
            float(self.xy[:, 0].min() - self.margin),
            float(self.xy[:, 1].min() - self.margin),
            float(self.xy[:, 0].max() + self.margin),
            float(self.xy[:, 1].max() + self.margin),
        )

    @cached_property
    def positions(self) -> dict[int, tuple[float, float]]:
        return {int(n): (float(x), float(y)) for n, (x, y) in zip(self.node_ids, self.xy)}

    def position_of(self, node_id: int) -> tuple[float, float]:
        return self.positions[int(node_id)]

    def translate(self, dx: float, dy: float) -> "LocalLayout":
        return LocalLayout(self.node_ids, self.xy + np.array([dx, dy]), self.margin)

    @property
    def width(self) -> float:
        b = self.bbox
        return b[2] - b[0]

    @property
    def height(self) -> float:
        b = self.bbox
        return b[3] - b[1]


def _recenter(xy: np.ndarray) -> np.ndarray:
    lo = xy.min(axis=0)
    hi = xy.max(axis=0)
    return xy - (lo + hi) / 2.0


def _circular_xy(n: int, ideal: float) -> np.ndarray:
    radius = ideal * n / (2.0 * math.pi)
    ang = 2.0 * math.pi * np.arange(n) / n
    return np.column_stack([radius * np.cos(ang), radius * np.sin(ang)])


def _grid_xy(n: int, ideal: float) -> np.ndarray:
    cols = math.ceil(math.sqrt(n))
    i = np.arange(n)
    return np.column_stack([(i % cols) * ideal, (i // cols) * ideal]).astype(np.float64)


def _force_component(nc: int, esrc: np.ndarray, edst: np.ndarray, alg: LayoutAlgorithm, rng) -> np.ndarray:
    if nc == 1:
        return np.zeros((1, 2))
    span = alg.ideal_edge_length * math.sqrt(nc)
    pos = rng.uniform(0.0, span, size=(nc, 2))
    diag = math.hypot(
        float(pos[:, 0].max() - pos[:, 0].min()),
        float(pos[:, 1].max() - pos[:, 1].min()),
    )
    t0 = max(diag / 10.0, 0.1)
    temps = np.linspace(t0, 0.1, alg.iterations)
    cutoff = 0.0 if nc <= _EXACT_REPULSION_MAX else 3.0 * alg.ideal_edge_length
    return kernels.fr_run(pos, esrc, edst, alg.ideal_edge_length, temps, cutoff)


def layout_partition(sub: Graph, alg: LayoutAlgorithm, seed: int = 0, margin: float = 20.0) -> LocalLayout:
    """Lay out one partition's induced sub-graph.

    force_directed packs disconnected components left to right; circular and
    grid are edge-blind global patterns over nodes in ascending-id order.
    The whole layout is recentered so its tight bbox is centered at (0, 0).
    """
    n = sub.node_count
    if n == 0:
        raise LayoutError("cannot lay out an empty sub-graph")
    if n == 1:
        return LocalLayout(sub.node_ids, np.zeros((1, 2)), margin)

    order = np.argsort(sub.node_ids, kind="stable")
    xy = np.empty((n, 2), np.float64)

    if alg.kind == CIRCULAR:
        xy[order] = _circular_xy(n, alg.ideal_edge_length)
    elif alg.kind == GRID:
        xy[order] = _grid_xy(n, alg.ideal_edge_length)
    else:
        rng = np.random.default_rng(seed)
        src, dst = sub.edge_index
        pairs = combined_pairs(n, src, dst)
        indptr, indices, _ = csr_from_pairs(n, *pairs)
        comp = connected_components(n, indptr, indices)
        ncomp = int(comp.max()) + 1
        gap = alg.ideal_edge_length
        cursor = 0.0
        for c in range(ncomp):
            members = np.flatnonzero(comp == c)
            local = np.full(n, -1, np.int64)
            local[members] = np.arange(members.shape[0])
            on_c = comp[src] == c if src.shape[0] else np.zeros(0, np.bool_)
            cxy = _recenter(
                _force_component(members.shape[0], local[src[on_c]], local[dst[on_c]], alg, rng)
            )
            width = float(cxy[:, 0].max() - cxy[:, 0].min())
            xy[members, 0] = cxy[:, 0] - cxy[:, 0].min() + cursor
            xy[members, 1] = cxy[:, 1]
            cursor += width + gap

    xy = _recenter(xy)
    return LocalLayout(sub.node_ids, xy, margin)
