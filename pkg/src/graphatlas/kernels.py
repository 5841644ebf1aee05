"""Hot numeric kernels, each with a numba and a numpy implementation.

The active backend is chosen at import time from the ``GRAPHATLAS_NUMBA``
environment variable: ``auto`` (default) uses numba when importable,
``0``/``off`` forces the numpy path, ``1``/``on`` requires numba.
``use_backend()`` switches at runtime (used by tests and the benchmark).

Integer kernels (matching, refinement, R-tree traversal, segment masks)
produce identical outputs on both backends. Float accumulation order
differs between the force-layout backends, so their results agree to
rounding, not bit-for-bit; within one backend results are deterministic.
"""

from __future__ import annotations

import math
import os
from contextlib import contextmanager

import numpy as np

_ENV = os.environ.get("GRAPHATLAS_NUMBA", "auto").strip().lower()

if _ENV in ("0", "off", "false", "no"):
    _HAVE_NUMBA = False
else:
    try:
        from numba import njit

        _HAVE_NUMBA = True
    except ImportError:
        if _ENV in ("1", "on", "true", "yes"):
            raise ImportError("GRAPHATLAS_NUMBA=1 but numba is not importable")
        _HAVE_NUMBA = False

_BACKEND = "numba" if _HAVE_NUMBA else "numpy"


def active_backend() -> str:
    return _BACKEND


@contextmanager
def use_backend(name: str):
    """Temporarily force a backend ("numba" or "numpy")."""
    global _BACKEND
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not _HAVE_NUMBA:
        raise RuntimeError("numba backend unavailable")
    prev = _BACKEND
    _BACKEND = name
    try:
        yield
    finally:
        _BACKEND = prev


# ---------------------------------------------------------------------------
# Force-directed layout iterations (Fruchterman-Reingold style).
#
# Repulsion is exact all-pairs when cutoff <= 0, otherwise limited to pairs
# closer than `cutoff` (grid binning / KD-tree); attraction always runs over
# the full edge list. `temps` holds one displacement cap per iteration.
# ---------------------------------------------------------------------------


def _fr_run_loop(pos, esrc, edst, k, temps, cutoff):
    n = pos.shape[0]
    pos = pos.copy()
    disp = np.zeros((n, 2), np.float64)
    k2 = k * k
    cut2 = cutoff * cutoff
    for t in range(temps.shape[0]):
        for i in range(n):
            disp[i, 0] = 0.0
            disp[i, 1] = 0.0
        if cutoff <= 0.0:
            for i in range(n):
                for j in range(i + 1, n):
                    dx = pos[i, 0] - pos[j, 0]
                    dy = pos[i, 1] - pos[j, 1]
                    d2 = dx * dx + dy * dy
                    if d2 > 0.0:
                        f = k2 / d2
                        disp[i, 0] += dx * f
                        disp[i, 1] += dy * f
                        disp[j, 0] -= dx * f
                        disp[j, 1] -= dy * f
        else:
            minx = pos[0, 0]
            miny = pos[0, 1]
            for i in range(1, n):
                if pos[i, 0] < minx:
                    minx = pos[i, 0]
                if pos[i, 1] < miny:
                    miny = pos[i, 1]
            cx = np.empty(n, np.int64)
            cy = np.empty(n, np.int64)
            for i in range(n):
                cx[i] = np.int64((pos[i, 0] - minx) // cutoff)
                cy[i] = np.int64((pos[i, 1] - miny) // cutoff)
            width = np.int64(0)
            for i in range(n):
                if cy[i] > width:
                    width = cy[i]
            width += 2
            key = cx * width + cy
            order = np.argsort(key)
            skey = key[order]
            for i in range(n):
                for dxc in range(-1, 2):
                    base = (cx[i] + dxc) * width + cy[i]
                    lo = np.searchsorted(skey, base - 1, side="left")
                    hi = np.searchsorted(skey, base + 1, side="right")
                    for s in range(lo, hi):
                        j = order[s]
                        if j == i:
                            continue
                        dx = pos[i, 0] - pos[j, 0]
                        dy = pos[i, 1] - pos[j, 1]
                        d2 = dx * dx + dy * dy
                        if d2 > 0.0 and d2 <= cut2:
                            f = k2 / d2
                            disp[i, 0] += dx * f
                            disp[i, 1] += dy * f
        for e in range(esrc.shape[0]):
            a = esrc[e]
            b = edst[e]
            dx = pos[a, 0] - pos[b, 0]
            dy = pos[a, 1] - pos[b, 1]
            d = math.sqrt(dx * dx + dy * dy)
            if d > 0.0:
                f = d / k
                disp[a, 0] -= dx * f
                disp[a, 1] -= dy * f
                disp[b, 0] += dx * f
                disp[b, 1] += dy * f
        cap = temps[t]
        for i in range(n):
            dl = math.sqrt(disp[i, 0] * disp[i, 0] + disp[i, 1] * disp[i, 1])
            if dl > 0.0:
                s = min(dl, cap) / dl
                pos[i, 0] += disp[i, 0] * s
                pos[i, 1] += disp[i, 1] * s
    return pos


def _fr_run_numpy(pos, esrc, edst, k, temps, cutoff):
    pos = pos.copy()
    n = pos.shape[0]
    k2 = k * k
    for cap in temps:
        if cutoff <= 0.0:
            disp = np.zeros((n, 2), np.float64)
            for s in range(0, n, 512):
                blk = pos[s : s + 512]
                delta = blk[:, None, :] - pos[None, :, :]
                d2 = delta[..., 0] ** 2 + delta[..., 1] ** 2
                f = np.where(d2 > 0.0, k2 / np.where(d2 > 0.0, d2, 1.0), 0.0)
                disp[s : s + 512] = (delta * f[..., None]).sum(axis=1)
        else:
            from scipy.spatial import cKDTree

            disp = np.zeros((n, 2), np.float64)
            pairs = cKDTree(pos).query_pairs(cutoff, output_type="ndarray")
            if pairs.shape[0]:
                pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
                delta = pos[pairs[:, 0]] - pos[pairs[:, 1]]
                d2 = delta[:, 0] ** 2 + delta[:, 1] ** 2
                f = np.where(d2 > 0.0, k2 / np.where(d2 > 0.0, d2, 1.0), 0.0)
                v = delta * f[:, None]
                np.add.at(disp, pairs[:, 0], v)
                np.add.at(disp, pairs[:, 1], -v)
        if esrc.shape[0]:
            delta = pos[esrc] - pos[edst]
            d = np.sqrt(delta[:, 0] ** 2 + delta[:, 1] ** 2)
            v = delta * (d / k)[:, None]
            np.add.at(disp, esrc, -v)
            np.add.at(disp, edst, v)
        lens = np.sqrt(disp[:, 0] ** 2 + disp[:, 1] ** 2)
        safe = np.where(lens > 0.0, lens, 1.0)
        scale = np.where(lens > 0.0, np.minimum(lens, cap) / safe, 0.0)
        pos += disp * scale[:, None]
    return pos


# ---------------------------------------------------------------------------
# Exact segment vs. closed-rectangle overlap (separating axis test: x, y,
# and the segment normal). Zero-length segments degrade to point-in-rect.
# ---------------------------------------------------------------------------


def _segment_rect_mask_loop(x1, y1, x2, y2, qx1, qy1, qx2, qy2, out):
    for i in range(x1.shape[0]):
        a = x1[i]
        b = y1[i]
        c = x2[i]
        d = y2[i]
        if min(a, c) > qx2 or max(a, c) < qx1 or min(b, d) > qy2 or max(b, d) < qy1:
            out[i] = False
            continue
        nx = b - d
        ny = c - a
        v = nx * a + ny * b
        p1 = nx * qx1 + ny * qy1
        p2 = nx * qx2 + ny * qy1
        p3 = nx * qx2 + ny * qy2
        p4 = nx * qx1 + ny * qy2
        lo = min(min(p1, p2), min(p3, p4))
        hi = max(max(p1, p2), max(p3, p4))
        out[i] = (lo <= v) and (v <= hi)
    return out


def _segment_rect_mask_numpy(x1, y1, x2, y2, qx1, qy1, qx2, qy2, out):
    bbox = (
        (np.minimum(x1, x2) <= qx2)
        & (np.maximum(x1, x2) >= qx1)
        & (np.minimum(y1, y2) <= qy2)
        & (np.maximum(y1, y2) >= qy1)
    )
    nx = y1 - y2
    ny = x2 - x1
    v = nx * x1 + ny * y1
    p1 = nx * qx1 + ny * qy1
    p2 = nx * qx2 + ny * qy1
    p3 = nx * qx2 + ny * qy2
    p4 = nx * qx1 + ny * qy2
    lo = np.minimum(np.minimum(p1, p2), np.minimum(p3, p4))
    hi = np.maximum(np.maximum(p1, p2), np.maximum(p3, p4))
    np.copyto(out, bbox & (lo <= v) & (v <= hi))
    return out


# ---------------------------------------------------------------------------
# R-tree window lookup over the packed arrays built in rtree.py. Marks the
# table rows whose entry bounding box overlaps the closed query rectangle.
# ---------------------------------------------------------------------------


def _rtree_query_loop(
    node_bounds, child_start, child_count, node_is_leaf, child_ids,
    entry_bounds, entry_row, root, qx1, qy1, qx2, qy2, out,
):
    stack = np.empty(node_bounds.shape[0] + 1, np.int64)
    sp = 0
    stack[0] = root
    sp = 1
    while sp > 0:
        sp -= 1
        nid = stack[sp]
        if (
            node_bounds[nid, 0] > qx2
            or node_bounds[nid, 2] < qx1
            or node_bounds[nid, 1] > qy2
            or node_bounds[nid, 3] < qy1
        ):
            continue
        s = child_start[nid]
        c = child_count[nid]
        if node_is_leaf[nid]:
            for e in range(s, s + c):
                if (
                    entry_bounds[e, 0] <= qx2
                    and entry_bounds[e, 2] >= qx1
                    and entry_bounds[e, 1] <= qy2
                    and entry_bounds[e, 3] >= qy1
                ):
                    out[entry_row[e]] = True
        else:
            for ci in range(s, s + c):
                stack[sp] = child_ids[ci]
                sp += 1
    return out


def _rtree_query_numpy(
    node_bounds, child_start, child_count, node_is_leaf, child_ids,
    entry_bounds, entry_row, root, qx1, qy1, qx2, qy2, out,
):
    stack = [int(root)]
    while stack:
        nid = stack.pop()
        b = node_bounds[nid]
        if b[0] > qx2 or b[2] < qx1 or b[1] > qy2 or b[3] < qy1:
            continue
        s = int(child_start[nid])
        c = int(child_count[nid])
        if node_is_leaf[nid]:
            eb = entry_bounds[s : s + c]
            hit = (eb[:, 0] <= qx2) & (eb[:, 2] >= qx1) & (eb[:, 1] <= qy2) & (eb[:, 3] >= qy1)
            out[entry_row[s : s + c][hit]] = True
        else:
            stack.extend(child_ids[s : s + c])
    return out


# ---------------------------------------------------------------------------
# Multilevel partitioning inner loops: heavy-edge matching and boundary
# refinement on a combined undirected CSR adjacency (no self-loops, parallel
# edges folded into integer weights). CSR neighbor lists are sorted
# ascending, so "first strict maximum" realizes the smallest-id tie-break.
# ---------------------------------------------------------------------------


def _match_loop(indptr, indices, weights, vw, maxw):
    n = indptr.shape[0] - 1
    match = np.full(n, -1, np.int64)
    for u in range(n):
        if match[u] != -1:
            continue
        best = np.int64(-1)
        bw = np.int64(0)
        for e in range(indptr[u], indptr[u + 1]):
            v = indices[e]
            if v == u or match[v] != -1:
                continue
            if vw[u] + vw[v] > maxw:
                continue
            if weights[e] > bw:
                bw = weights[e]
                best = v
        if best == -1:
            match[u] = u
        else:
            match[u] = best
            match[best] = u
    return match


def _refine_loop(indptr, indices, weights, vw, part, k, cap, max_passes, swap_deg_limit):
    n = indptr.shape[0] - 1
    psize = np.zeros(k, np.int64)
    for i in range(n):
        psize[part[i]] += vw[i]
    conn = np.zeros(k, np.int64)
    stamp = np.full(k, -1, np.int64)
    for _p in range(max_passes):
        improved = False
        for u in range(n):
            pu = part[u]
            if psize[pu] - vw[u] < 1:
                continue
            lo = indptr[u]
            hi = indptr[u + 1]
            if lo == hi:
                continue
            for e in range(lo, hi):
                pv = part[indices[e]]
                if stamp[pv] != u:
                    stamp[pv] = u
                    conn[pv] = 0
                conn[pv] += weights[e]
            internal = conn[pu] if stamp[pu] == u else np.int64(0)
            bestp = np.int64(-1)
            bestg = np.int64(0)
            for e in range(lo, hi):
                pv = part[indices[e]]
                if pv == pu:
                    continue
                g = conn[pv] - internal
                if g > bestg and psize[pv] + vw[u] <= cap:
                    bestg = g
                    bestp = pv
            if bestp != -1:
                part[u] = bestp
                psize[pu] -= vw[u]
                psize[bestp] += vw[u]
                improved = True
        for u in range(n):
            lo = indptr[u]
            hi = indptr[u + 1]
            if hi - lo > swap_deg_limit:
                continue
            pu = part[u]
            for e in range(lo, hi):
                v = indices[e]
                if v <= u:
                    continue
                pv = part[v]
                if pv == pu:
                    continue
                lov = indptr[v]
                hiv = indptr[v + 1]
                if hiv - lov > swap_deg_limit:
                    continue
                cu_pu = np.int64(0)
                cu_pv = np.int64(0)
                for e2 in range(lo, hi):
                    p2 = part[indices[e2]]
                    if p2 == pu:
                        cu_pu += weights[e2]
                    elif p2 == pv:
                        cu_pv += weights[e2]
                cv_pu = np.int64(0)
                cv_pv = np.int64(0)
                for e2 in range(lov, hiv):
                    p2 = part[indices[e2]]
                    if p2 == pu:
                        cv_pu += weights[e2]
                    elif p2 == pv:
                        cv_pv += weights[e2]
                gain = (cu_pv - cu_pu) + (cv_pu - cv_pv) - 2 * weights[e]
                if gain > 0:
                    szu = psize[pu] - vw[u] + vw[v]
                    szv = psize[pv] - vw[v] + vw[u]
                    if szu <= cap and szv <= cap:
                        part[u] = pv
                        part[v] = pu
                        psize[pu] = szu
                        psize[pv] = szv
                        improved = True
                        pu = part[u]
                        break
        if not improved:
            break
    return part


# ---------------------------------------------------------------------------
# Backend dispatch
# ---------------------------------------------------------------------------

if _HAVE_NUMBA:
    _fr_run_nb = njit(cache=True, nogil=True)(_fr_run_loop)
    _segment_rect_mask_nb = njit(cache=True, nogil=True)(_segment_rect_mask_loop)
    _rtree_query_nb = njit(cache=True, nogil=True)(_rtree_query_loop)
    _match_nb = njit(cache=True, nogil=True)(_match_loop)
    _refine_nb = njit(cache=True, nogil=True)(_refine_loop)


def fr_run(pos, esrc, edst, k, temps, cutoff):
    """Run force-directed iterations; returns new positions (copy)."""
    if _BACKEND == "numba":
        return _fr_run_nb(pos, esrc, edst, k, temps, cutoff)
    return _fr_run_numpy(pos, esrc, edst, k, temps, cutoff)


def segment_rect_mask(x1, y1, x2, y2, rect, out=None):
    """Boolean mask of segments overlapping the closed rectangle."""
    if out is None:
        out = np.empty(x1.shape[0], np.bool_)
    qx1, qy1, qx2, qy2 = (float(v) for v in rect)
    if _BACKEND == "numba":
        return _segment_rect_mask_nb(x1, y1, x2, y2, qx1, qy1, qx2, qy2, out)
    return _segment_rect_mask_numpy(x1, y1, x2, y2, qx1, qy1, qx2, qy2, out)


def rtree_query(tree_arrays, rect, out):
    """Mark rows whose entry bbox overlaps rect; returns the mask."""
    (node_bounds, child_start, child_count, node_is_leaf, child_ids,
     entry_bounds, entry_row, root) = tree_arrays
    qx1, qy1, qx2, qy2 = (float(v) for v in rect)
    fn = _rtree_query_nb if _BACKEND == "numba" else _rtree_query_numpy
    return fn(
        node_bounds, child_start, child_count, node_is_leaf, child_ids,
        entry_bounds, entry_row, root, qx1, qy1, qx2, qy2, out,
    )


def match_heavy_edge(indptr, indices, weights, vw, maxw):
    """Heavy-edge matching; match[u] == u marks an unmatched singleton."""
    fn = _match_nb if _BACKEND == "numba" else _match_loop
    return fn(indptr, indices, weights, vw, np.int64(maxw))


def refine_partition(indptr, indices, weights, vw, part, k, cap, max_passes=8, swap_deg_limit=512):
    """Greedy move + pairwise-swap boundary refinement, in place."""
    fn = _refine_nb if _BACKEND == "numba" else _refine_loop
    return fn(
        indptr, indices, weights, vw, part,
        np.int64(k), np.int64(cap), np.int64(max_passes), np.int64(swap_deg_limit),
    )
