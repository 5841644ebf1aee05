"""Undirected adjacency helpers shared by the partitioner and layout."""

from __future__ import annotations

import numpy as np


def group_pairs(n: int, u: np.ndarray, v: np.ndarray, w: np.ndarray):
    """Fold duplicate (u, v) pairs, summing weights; output sorted by (u, v)."""
    if u.shape[0] == 0:
        e = np.zeros(0, np.int64)
        return e, e.copy(), e.copy()
    order = np.lexsort((v, u))
    u, v, w = u[order], v[order], w[order]
    first = np.empty(u.shape[0], np.bool_)
    first[0] = True
    first[1:] = (u[1:] != u[:-1]) | (v[1:] != v[:-1])
    starts = np.flatnonzero(first)
    sums = np.add.reduceat(w, starts)
    return u[starts].astype(np.int64), v[starts].astype(np.int64), sums.astype(np.int64)


def combined_pairs(n: int, src: np.ndarray, dst: np.ndarray):
    """Symmetric (u, v, w) pairs from directed edges: loops dropped, parallels folded."""
    keep = src != dst
    s, d = src[keep], dst[keep]
    u = np.concatenate([s, d])
    v = np.concatenate([d, s])
    return group_pairs(n, u, v, np.ones(u.shape[0], np.int64))


def csr_from_pairs(n: int, uu: np.ndarray, vv: np.ndarray, ww: np.ndarray):
    """CSR arrays (indptr, indices, weights); neighbor lists sorted ascending."""
    counts = np.bincount(uu, minlength=n) if uu.shape[0] else np.zeros(n, np.int64)
    indptr = np.zeros(n + 1, np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, vv.copy(), ww.copy()


def connected_components(n: int, indptr: np.ndarray, indices: np.ndarray) -> np.ndarray:
    """Component id per vertex, numbered by smallest member in ascending order."""
    comp = np.full(n, -1, np.int64)
    queue = np.empty(n, np.int64)
    cid = 0
    for seed in range(n):
        if comp[seed] != -1:
            continue
        comp[seed] = cid
        queue[0] = seed
        head, tail = 0, 1
        while head < tail:
            u = queue[head]
            head += 1
            for e in range(indptr[u], indptr[u + 1]):
                v = indices[e]
                if comp[v] == -1:
                    comp[v] = cid
                    queue[tail] = v
                    tail += 1
        cid += 1
    return comp
