"""Packed R-tree over 2-D bounding boxes, bulk-loaded sort-tile-recursive.

The tree is a set of flat numpy arrays (easy to serialize, friendly to the
query kernels) and is immutable after construction. Queries prune by node
and entry bounding boxes only; exact geometry refinement is the caller's
job. Boundary semantics are closed: touching boxes overlap.
"""

from __future__ import annotations

import math

import numpy as np

from . import kernels

LEAF_CAPACITY = 16

_ARRAY_FIELDS = (
    "node_bounds", "child_start", "child_count", "node_is_leaf",
    "child_ids", "entry_bounds", "entry_row",
)


def _str_chunks(bounds: np.ndarray, cap: int) -> list[np.ndarray]:
    """Group items into runs of <= cap by sort-tile-recursive tiling.

    Returns index arrays (into `bounds`) per run; ties in the center sort
    fall back to the original index so packing is deterministic.
    """
    n = bounds.shape[0]
    cx = (bounds[:, 0] + bounds[:, 2]) * 0.5
    cy = (bounds[:, 1] + bounds[:, 3]) * 0.5
    n_groups = math.ceil(n / cap)
    n_slabs = math.ceil(math.sqrt(n_groups))
    by_x = np.lexsort((np.arange(n), cx))
    slab_size = math.ceil(n / n_slabs)
    chunks = []
    for s in range(0, n, slab_size):
        slab = by_x[s : s + slab_size]
        slab = slab[np.lexsort((slab, cy[slab]))]
        for c in range(0, slab.shape[0], cap):
            chunks.append(slab[c : c + cap])
    return chunks


class STRtree:
    """Bulk-loaded R-tree; query() marks overlapping entries in a bool mask."""

    def __init__(self, bounds: np.ndarray, cap: int = LEAF_CAPACITY):
        bounds = np.ascontiguousarray(bounds, dtype=np.float64).reshape(-1, 4)
        self.n_entries = bounds.shape[0]
        self.cap = cap
        if self.n_entries == 0:
            self.node_bounds = np.zeros((0, 4))
            self.child_start = np.zeros(0, np.int64)
            self.child_count = np.zeros(0, np.int64)
            self.node_is_leaf = np.zeros(0, np.bool_)
            self.child_ids = np.zeros(0, np.int64)
            self.entry_bounds = np.zeros((0, 4))
            self.entry_row = np.zeros(0, np.int64)
            self.root = -1
            return

        chunks = _str_chunks(bounds, cap)
        entry_row = np.concatenate(chunks)
        entry_bounds = bounds[entry_row]

        node_bounds, child_start, child_count, is_leaf = [], [], [], []
        child_ids: list[int] = []
        level: list[int] = []
        offset = 0
        for ch in chunks:
            node_bounds.append(
                (
                    entry_bounds[offset : offset + ch.shape[0], 0].min(),
                    entry_bounds[offset : offset + ch.shape[0], 1].min(),
                    entry_bounds[offset : offset + ch.shape[0], 2].max(),
                    entry_bounds[offset : offset + ch.shape[0], 3].max(),
                )
            )
            child_start.append(offset)
            child_count.append(ch.shape[0])
            is_leaf.append(True)
            level.append(len(node_bounds) - 1)
            offset += ch.shape[0]

        while len(level) > 1:
            lbounds = np.asarray([node_bounds[i] for i in level])
            groups = _str_chunks(lbounds, cap)
            next_level = []
            for grp in groups:
                members = [level[i] for i in grp]
                gb = lbounds[grp]
                node_bounds.append((gb[:, 0].min(), gb[:, 1].min(), gb[:, 2].max(), gb[:, 3].max()))
                child_start.append(len(child_ids))
                child_count.append(len(members))
                is_leaf.append(False)
                child_ids.extend(members)
                next_level.append(len(node_bounds) - 1)
            level = next_level

        self.node_bounds = np.asarray(node_bounds, np.float64)
        self.child_start = np.asarray(child_start, np.int64)
        self.child_count = np.asarray(child_count, np.int64)
        self.node_is_leaf = np.asarray(is_leaf, np.bool_)
        self.child_ids = np.asarray(child_ids, np.int64)
        self.entry_bounds = entry_bounds
        self.entry_row = entry_row.astype(np.int64)
        self.root = level[0]

    def query(self, rect, out: np.ndarray | None = None) -> np.ndarray:
        """Set out[row] = True for entries whose bbox overlaps the closed rect."""
        if out is None:
            out = np.zeros(self.n_entries, np.bool_)
        if self.n_entries == 0:
            return out
        kernels.rtree_query(
            (
                self.node_bounds, self.child_start, self.child_count,
                self.node_is_leaf, self.child_ids, self.entry_bounds,
                self.entry_row, self.root,
            ),
            rect,
            out,
        )
        return out

    def to_arrays(self) -> dict[str, np.ndarray]:
        out = {name: getattr(self, name) for name in _ARRAY_FIELDS}
        out["meta"] = np.asarray([self.n_entries, self.cap, self.root], np.int64)
        return out

    @classmethod
    def from_arrays(cls, arrays: dict[str, np.ndarray]) -> "STRtree":
        tree = cls.__new__(cls)
        for name in _ARRAY_FIELDS:
            setattr(tree, name, arrays[name])
        tree.n_entries, tree.cap, tree.root = (int(v) for v in arrays["meta"])
        return tree
