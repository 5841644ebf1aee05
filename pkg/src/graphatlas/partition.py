"""k-way graph partitioning minimizing edge cut.

Multilevel scheme: coarsen by heavy-edge matching, partition the coarsest
graph by seeded greedy region growing (several restarts, best cut kept),
then uncoarsen with boundary move/swap refinement at every level. All tie
breaks favor the smallest node id, so results are reproducible per seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from .adjacency import combined_pairs, csr_from_pairs, group_pairs
from .errors import ConfigError
from .model import Graph

_COARSEST_FLOOR = 32
_RESTARTS_SMALL = 8
_RESTARTS_LARGE = 4


@dataclass(frozen=True)
class PartitionConfig:
    k: int
    balance_tolerance: float = 1.1
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        if self.balance_tolerance < 1.0:
            raise ConfigError("balance_tolerance must be >= 1.0")


@dataclass(frozen=True)
class PartitionAssignment:
    node_ids: np.ndarray   # uint64, graph node order
    parts: np.ndarray      # int64, aligned with node_ids
    n_parts: int
    cut_edges: int

    @cached_property
    def part_of(self) -> dict[int, int]:
        return {int(n): int(p) for n, p in zip(self.node_ids, self.parts)}

    def sizes(self) -> np.ndarray:
        return np.bincount(self.parts, minlength=self.n_parts)


def default_partition_count(edge_count: int) -> int:
    """Heuristic partition count: one partition per ~50K edges, in [1, 1024]."""
    return max(1, min(1024, math.ceil(edge_count / 50_000)))


def _cut_weight(part: np.ndarray, uu: np.ndarray, vv: np.ndarray, ww: np.ndarray) -> int:
    if uu.shape[0] == 0:
        return 0
    return int(ww[part[uu] != part[vv]].sum()) // 2


def _grow_partitions(indptr, indices, weights, vw, k, cap, rng):
    """Seeded greedy region growing; every partition gets at least one vertex."""
    n = vw.shape[0]
    part = np.full(n, -1, np.int64)
    assigned = np.zeros(n, np.bool_)
    conn = np.zeros(n, np.int64)
    remaining = int(vw.sum())
    for p in range(k):
        quota = min(math.ceil(remaining / (k - p)), cap)
        cand = np.flatnonzero(~assigned)
        if cand.shape[0] == 0:
            break
        cur = int(cand[rng.integers(cand.shape[0])])
        conn[:] = 0
        size = 0
        while True:
            part[cur] = p
            assigned[cur] = True
            size += int(vw[cur])
            remaining -= int(vw[cur])
            row = slice(indptr[cur], indptr[cur + 1])
            nbrs = indices[row]
            um = ~assigned[nbrs]
            conn[nbrs[um]] += weights[row][um]
            if size >= quota:
                break
            scores = np.where(assigned, np.int64(-1), conn)
            cur = int(np.argmax(scores))
            if scores[cur] <= 0:
                rest = np.flatnonzero(~assigned)
                if rest.shape[0] == 0:
                    break
                cur = int(rest[0])
            if size > 0 and size + int(vw[cur]) > cap:
                break
    # stragglers: least-loaded partition with room, then least-loaded overall
    leftovers = np.flatnonzero(~assigned)
    if leftovers.shape[0]:
        sizes = np.zeros(k, np.int64)
        np.add.at(sizes, part[assigned], vw[assigned])
        for u in leftovers:
            room = np.flatnonzero(sizes + vw[u] <= cap)
            target = int(room[np.argmin(sizes[room])]) if room.shape[0] else int(np.argmin(sizes))
            part[u] = target
            sizes[target] += vw[u]
    return part


def _rebalance_unit(indptr, indices, weights, part, k, cap):
    """Final safety pass at the finest (unit-weight) level: shed vertices from
    over-capacity partitions with minimum cut damage."""
    sizes = np.bincount(part, minlength=k)
    guard = 0
    while (sizes > cap).any():
        guard += 1
        if guard > part.shape[0] * 2:
            break
        p = int(np.flatnonzero(sizes > cap)[0])
        members = np.flatnonzero(part == p)
        room = np.flatnonzero(sizes < cap)
        room = room[room != p]
        best = None
        for u in members:
            row = slice(indptr[u], indptr[u + 1])
            nbr_parts = part[indices[row]]
            ws = weights[row]
            internal = int(ws[nbr_parts == p].sum())
            for q in room:
                gain = int(ws[nbr_parts == q].sum()) - internal
                key = (-gain, int(u), int(q))
                if best is None or key < best[0]:
                    best = (key, int(u), int(q))
        _, u, q = best
        part[u] = q
        sizes[p] -= 1
        sizes[q] += 1
    return part


def partition(g: Graph, cfg: PartitionConfig) -> PartitionAssignment:
    """Assign every node to one of cfg.k partitions, minimizing edge cut."""
    n = g.node_count
    if n == 0:
        raise ConfigError("cannot partition an empty graph")
    if cfg.k > n:
        raise ConfigError(f"k={cfg.k} exceeds node count {n}")
    k = cfg.k
    src, dst = g.edge_index

    if k == 1:
        parts = np.zeros(n, np.int64)
    elif k == n:
        parts = np.arange(n, dtype=np.int64)
    else:
        cap = math.ceil(cfg.balance_tolerance * n / k)
        rng = np.random.default_rng(cfg.seed)
        uu, vv, ww = combined_pairs(n, src, dst)
        levels = [(n, csr_from_pairs(n, uu, vv, ww), np.ones(n, np.int64), (uu, vv, ww))]
        cmaps = []
        floor = max(_COARSEST_FLOOR, 4 * k)
        maxw = max(2, cap // 2)
        while levels[-1][0] > floor:
            ln, (indptr, indices, weights), vw, pairs = levels[-1]
            match = kernels.match_heavy_edge(indptr, indices, weights, vw, maxw)
            rep = np.minimum(np.arange(ln, dtype=np.int64), match)
            uniq = np.unique(rep)
            if uniq.shape[0] > 0.95 * ln:
                break
            cmap = np.searchsorted(uniq, rep)
            cvw = np.bincount(cmap, weights=vw, minlength=uniq.shape[0]).astype(np.int64)
            puu, pvv, pww = pairs
            cu, cv = cmap[puu], cmap[pvv]
            keep = cu != cv
            cpairs = group_pairs(uniq.shape[0], cu[keep], cv[keep], pww[keep])
            levels.append((uniq.shape[0], csr_from_pairs(uniq.shape[0], *cpairs), cvw, cpairs))
            cmaps.append(cmap)

        cn, (cindptr, cindices, cweights), cvw, cpairs = levels[-1]
        restarts = _RESTARTS_SMALL if cn <= 64 else _RESTARTS_LARGE
        best_part, best_cut = None, None
        for _ in range(restarts):
            cand = _grow_partitions(cindptr, cindices, cweights, cvw, k, cap, rng)
            kernels.refine_partition(cindptr, cindices, cweights, cvw, cand, k, cap)
            cut = _cut_weight(cand, *cpairs)
            if best_cut is None or cut < best_cut:
                best_part, best_cut = cand, cut
        parts = best_part

        for li in range(len(levels) - 2, -1, -1):
            parts = parts[cmaps[li]]
            ln, (indptr, indices, weights), vw, _ = levels[li]
            kernels.refine_partition(indptr, indices, weights, vw, parts, k, cap)

        indptr, indices, weights = levels[0][1]
        if (np.bincount(parts, minlength=k) > cap).any():
            _rebalance_unit(indptr, indices, weights, parts, k, cap)

    cut = int((parts[src] != parts[dst]).sum()) if src.shape[0] else 0
    return PartitionAssignment(g.node_ids, parts, k, cut)


def aligned_parts(g: Graph, a: PartitionAssignment) -> np.ndarray:
    """Partition index per node in g's node order; raises on unassigned nodes."""
    if a.node_ids.shape[0] == 0:
        if g.node_count:
            raise ConfigError(f"node {int(g.node_ids[0])} has no partition assignment")
        return np.zeros(0, np.int64)
    order = np.argsort(a.node_ids, kind="stable")
    sorted_ids = a.node_ids[order]
    pos = np.searchsorted(sorted_ids, g.node_ids)
    bad = (pos >= sorted_ids.shape[0]) | (
        sorted_ids[np.minimum(pos, sorted_ids.shape[0] - 1)] != g.node_ids
    )
    if np.asarray(bad).any():
        missing = g.node_ids[np.asarray(bad)][0]
        raise ConfigError(f"node {int(missing)} has no partition assignment")
    return a.parts[order][pos]


def edge_cut(g: Graph, a: PartitionAssignment) -> int:
    """Recount edges whose endpoints sit in different partitions.

    Parallel edges count individually; self-loops never count. Raises if
    any graph node is missing from the assignment.
    """
    parts = aligned_parts(g, a)
    src, dst = g.edge_index
    if src.shape[0] == 0:
        return 0
    return int((parts[src] != parts[dst]).sum())
