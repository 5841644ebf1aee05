"""Arrange laid-out partitions on the global plane.

Greedy loop: the partition with the most crossing edges is pinned at the
origin; the rest are kept in a priority queue keyed by how many crossing
edges they share with already-placed partitions (descending) and placed
one by one on the slot of a search ring around the occupied area that
minimizes the total length of their crossing edges to placed partitions.
Boxes never overlap; partitions move rigidly (translation only).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ArrangementError
from .layout import LocalLayout
from .model import Graph
from .partition import PartitionAssignment, aligned_parts

DEFAULT_GAP = 40.0

Rect = tuple[float, float, float, float]


@dataclass(frozen=True)
class CrossingEdge:
    source: tuple[int, int]    # (partition index, node id)
    target: tuple[int, int]
    label: str = ""

    def __post_init__(self):
        if self.source[0] == self.target[0]:
            raise ArrangementError("crossing edge endpoints share a partition")


@dataclass(frozen=True)
class GlobalLayout:
    node_ids: np.ndarray               # uint64
    xy: np.ndarray                     # float64 (n, 2), global pixels
    partition_boxes: tuple[Rect, ...]  # one per partition
    part_index: np.ndarray             # int64 per node

    @cached_property
    def positions(self) -> dict[int, tuple[float, float]]:
        return {int(n): (float(x), float(y)) for n, (x, y) in zip(self.node_ids, self.xy)}

    def position_of(self, node_id: int) -> tuple[float, float]:
        return self.positions[int(node_id)]

    def validate(self):
        """Check box disjointness and node containment (test support)."""
        boxes = self.partition_boxes
        for i in range(len(boxes)):
            for j in range(i + 1, len(boxes)):
                if _interiors_overlap(boxes[i], boxes[j]):
                    raise ArrangementError(f"boxes {i} and {j} overlap")
        for p, (x, y) in zip(self.part_index, self.xy):
            b = boxes[p]
            if not (b[0] <= x <= b[2] and b[1] <= y <= b[3]):
                raise ArrangementError(f"node position ({x}, {y}) outside box {int(p)}")


def _interiors_overlap(a: Rect, b: Rect) -> bool:
    return a[0] < b[2] and a[2] > b[0] and a[1] < b[3] and a[3] > b[1]


def count_crossing_edges(g: Graph, a: PartitionAssignment) -> np.ndarray:
    """Crossing edges incident to each partition (an edge p-q counts for both)."""
    parts = aligned_parts(g, a)
    src, dst = g.edge_index
    if src.shape[0] == 0:
        return np.zeros(a.n_parts, np.int64)
    cross = parts[src] != parts[dst]
    return (
        np.bincount(parts[src][cross], minlength=a.n_parts)
        + np.bincount(parts[dst][cross], minlength=a.n_parts)
    ).astype(np.int64)


def crossing_edges(g: Graph, a: PartitionAssignment) -> list[CrossingEdge]:
    """Materialize the crossing edges of an assignment."""
    parts = aligned_parts(g, a)
    src, dst = g.edge_index
    out = []
    for e in range(src.shape[0]):
        ps, pd = int(parts[src[e]]), int(parts[dst[e]])
        if ps != pd:
            out.append(
                CrossingEdge(
                    (ps, int(g.node_ids[src[e]])),
                    (pd, int(g.node_ids[dst[e]])),
                    g.edge_labels[e],
                )
            )
    return out


def _slot_costs(slots: np.ndarray, local_xy: np.ndarray, placed_xy: np.ndarray, bbox_min: np.ndarray) -> np.ndarray:
    """Total crossing-edge length for each candidate slot (slot = box min corner)."""
    if local_xy.shape[0] == 0:
        return np.zeros(slots.shape[0])
    offsets = slots - bbox_min[None, :]
    diff = local_xy[None, :, :] + offsets[:, None, :] - placed_xy[None, :, :]
    return np.sqrt(diff[..., 0] ** 2 + diff[..., 1] ** 2).sum(axis=1)


def placement_cost(candidate_box: Rect, popped_layout: LocalLayout, placed: GlobalLayout, crossings) -> float:
    """Sum of Euclidean lengths of crossing edges between the popped partition
    (translated into candidate_box) and the already-placed partitions.

    Edges whose other endpoint is not placed yet contribute nothing.
    """
    for box in placed.partition_boxes:
        if _interiors_overlap(candidate_box, box):
            raise ArrangementError("candidate box overlaps a placed partition box")
    popped_pos = popped_layout.positions
    placed_pos = placed.positions
    local, other = [], []
    for ce in crossings:
        for a, b in ((ce.source, ce.target), (ce.target, ce.source)):
            if a[1] in popped_pos:
                if b[1] in placed_pos:
                    local.append(popped_pos[a[1]])
                    other.append(placed_pos[b[1]])
                break
    if not local:
        return 0.0
    b = popped_layout.bbox
    costs = _slot_costs(
        np.array([[candidate_box[0], candidate_box[1]]]),
        np.asarray(local, np.float64),
        np.asarray(other, np.float64),
        np.array([b[0], b[1]]),
    )
    return float(costs[0])


def _ring_slots(union: Rect, w: float, h: float, gap: float) -> np.ndarray:
    """Candidate min-corners for a w*h box on the ring around `union`.

    Fixed enumeration order (top row, bottom row, left column, right column,
    each from the low coordinate upward) defines the slot index used in
    tie-breaking.
    """
    xs = np.arange(union[0] - gap - w, union[2] + gap + 1e-9, w + gap)
    ys = np.arange(union[1] - gap - h, union[3] + gap + 1e-9, h + gap)
    slots = []
    for x in xs:
        slots.append((x, union[3] + gap))          # top row
    for x in xs:
        slots.append((x, union[1] - gap - h))      # bottom row
    for y in ys:
        slots.append((union[0] - gap - w, y))      # left column
    for y in ys:
        slots.append((union[2] + gap, y))          # right column
    return np.asarray(slots, np.float64)


def arrange(layouts: list[LocalLayout], crossings, gap: float = DEFAULT_GAP) -> GlobalLayout:
    """Place all partitions on the plane; see module docstring for the loop."""
    k = len(layouts)
    if k == 0:
        return GlobalLayout(np.zeros(0, np.uint64), np.zeros((0, 2)), (), np.zeros(0, np.int64))

    # per-edge endpoint tables (partition, row-in-layout) for both sides
    id_maps = [{int(n): i for i, n in enumerate(lay.node_ids)} for lay in layouts]
    n_e = len(crossings)
    ep = np.zeros((n_e, 2), np.int64)   # partition of each side
    ei = np.zeros((n_e, 2), np.int64)   # row within that partition's layout
    counts = np.zeros((k, k), np.int64)
    for e, ce in enumerate(crossings):
        (pa, na), (pb, nb) = ce.source, ce.target
        ep[e, 0], ep[e, 1] = pa, pb
        ei[e, 0] = id_maps[pa][na]
        ei[e, 1] = id_maps[pb][nb]
        counts[pa, pb] += 1
        counts[pb, pa] += 1

    totals = counts.sum(axis=1)
    offsets = np.zeros((k, 2), np.float64)
    placed = np.zeros(k, np.bool_)
    boxes: list[Rect | None] = [None] * k

    first = int(np.argmax(totals))
    b = layouts[first].bbox
    offsets[first] = (-(b[0] + b[2]) / 2.0, -(b[1] + b[3]) / 2.0)
    boxes[first] = (b[0] + offsets[first, 0], b[1] + offsets[first, 1],
                    b[2] + offsets[first, 0], b[3] + offsets[first, 1])
    placed[first] = True

    for _ in range(k - 1):
        # pop the unplaced partition with max (crossing edges to placed,
        # original crossing total, lowest index)
        keys = counts[:, placed].sum(axis=1)
        best = None
        for q in range(k):
            if placed[q]:
                continue
            cand = (int(keys[q]), int(totals[q]), -q)
            if best is None or cand > best[0]:
                best = (cand, q)
        p = best[1]

        lay = layouts[p]
        pb = lay.bbox
        w, h = pb[2] - pb[0], pb[3] - pb[1]
        placed_boxes = [bx for bx in boxes if bx is not None]
        union = (
            min(bx[0] for bx in placed_boxes),
            min(bx[1] for bx in placed_boxes),
            max(bx[2] for bx in placed_boxes),
            max(bx[3] for bx in placed_boxes),
        )
        slots = _ring_slots(union, w, h, gap)

        # crossing edges between p and the placed set
        side_in_p = ep == p
        touches_p = side_in_p.any(axis=1)
        other_side = np.where(side_in_p[:, 0], 1, 0)
        sel = np.flatnonzero(touches_p & placed[ep[np.arange(n_e), other_side]]) if n_e else np.zeros(0, np.int64)
        if sel.shape[0]:
            p_side = np.where(side_in_p[sel, 0], 0, 1)
            o_side = 1 - p_side
            local_xy = lay.xy[ei[sel, p_side]]
            o_parts = ep[sel, o_side]
            o_rows = ei[sel, o_side]
            placed_xy = np.stack(
                [layouts[q].xy[r] + offsets[q] for q, r in zip(o_parts, o_rows)]
            )
            costs = _slot_costs(slots, local_xy, placed_xy, np.array([pb[0], pb[1]]))
        else:
            costs = np.zeros(slots.shape[0])

        si = int(np.argmin(costs))   # first minimum = lowest slot index
        offsets[p] = (slots[si, 0] - pb[0], slots[si, 1] - pb[1])
        boxes[p] = (pb[0] + offsets[p, 0], pb[1] + offsets[p, 1],
                    pb[2] + offsets[p, 0], pb[3] + offsets[p, 1])
        placed[p] = True

    node_ids = np.concatenate([lay.node_ids for lay in layouts])
    xy = np.concatenate([lay.xy + offsets[i] for i, lay in enumerate(layouts)])
    part_index = np.concatenate(
        [np.full(lay.node_ids.shape[0], i, np.int64) for i, lay in enumerate(layouts)]
    )
    return GlobalLayout(node_ids, xy, tuple(boxes), part_index)
