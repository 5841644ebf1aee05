#!/usr/bin/env python3
"""Benchmark the numba kernels against their numpy fallbacks.

Usage: python benchmarks/bench_kernels.py [--quick]

Each kernel runs on both backends; the table reports median wall time and
the speedup. Results are cross-checked first (exact equality for the
integer/boolean kernels, one force-layout step to float tolerance), so a
fast-but-wrong backend fails loudly.
"""

import argparse
import time

import numpy as np

from graphatlas import kernels
from graphatlas.adjacency import combined_pairs, csr_from_pairs
from graphatlas.rtree import STRtree


def timed(fn, repeats):
    best = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best.append(time.perf_counter() - t0)
    return float(np.median(best))


def bench(name, make_args, run, check, repeats):
    if kernels.active_backend() != "numba":
        raise SystemExit("numba backend unavailable; nothing to compare")
    args = make_args()
    with kernels.use_backend("numba"):
        run(args)   # warm the JIT before timing
        out_nb = run(args)
        t_nb = timed(lambda: run(args), repeats)
    with kernels.use_backend("numpy"):
        out_np = run(args)
        t_np = timed(lambda: run(args), repeats)
    check(out_nb, out_np)
    print(f"{name:34s} numba {t_nb * 1000:9.2f} ms   numpy {t_np * 1000:9.2f} ms   x{t_np / t_nb:6.1f}")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true", help="smaller sizes, fewer repeats")
    opts = ap.parse_args()
    scale = 0.25 if opts.quick else 1.0
    repeats = 3 if opts.quick else 5
    rng = np.random.default_rng(0)
    print(f"active backend: {kernels.active_backend()}")

    # force layout, exact all-pairs repulsion
    n = int(800 * scale)
    pos = rng.uniform(0, 60 * np.sqrt(n), (n, 2))
    esrc = rng.integers(0, n, 3 * n).astype(np.int64)
    edst = rng.integers(0, n, 3 * n).astype(np.int64)
    temps = np.linspace(50.0, 0.1, 30)
    bench(
        f"fr_run exact n={n} it=30",
        lambda: (pos, esrc, edst, 60.0, temps, 0.0),
        lambda a: kernels.fr_run(*a),
        lambda x, y: np.testing.assert_allclose(
            kernels.fr_run(pos, esrc, edst, 60.0, temps[:1], 0.0),
            _numpy_step(pos, esrc, edst, temps[:1], 0.0),
            rtol=1e-9, atol=1e-6,
        ),
        repeats,
    )

    # force layout, cutoff repulsion at a size where exact would crawl
    n = int(20000 * scale)
    pos = rng.uniform(0, 60 * np.sqrt(n), (n, 2))
    esrc = rng.integers(0, n, 3 * n).astype(np.int64)
    edst = rng.integers(0, n, 3 * n).astype(np.int64)
    temps = np.linspace(200.0, 0.1, 10)
    bench(
        f"fr_run cutoff n={n} it=10",
        lambda: (pos, esrc, edst, 60.0, temps, 180.0),
        lambda a: kernels.fr_run(*a),
        lambda x, y: np.testing.assert_allclose(
            kernels.fr_run(pos, esrc, edst, 60.0, temps[:1], 180.0),
            _numpy_step(pos, esrc, edst, temps[:1], 180.0),
            rtol=1e-9, atol=1e-6,
        ),
        repeats,
    )

    # segment mask over many rows
    n = int(2_000_000 * scale)
    a = rng.uniform(-5000, 5000, (n, 2))
    b = a + rng.uniform(-60, 60, (n, 2))
    seg = (a[:, 0].copy(), a[:, 1].copy(), b[:, 0].copy(), b[:, 1].copy())
    rect = (-500.0, -500.0, 500.0, 500.0)
    bench(
        f"segment_rect_mask n={n}",
        lambda: seg,
        lambda s: kernels.segment_rect_mask(*s, rect),
        lambda x, y: np.testing.assert_array_equal(x, y),
        repeats,
    )

    # R-tree window queries
    n = int(500_000 * scale)
    lo = rng.uniform(-5000, 5000, (n, 2))
    bounds = np.column_stack([lo, lo + rng.uniform(0, 40, (n, 2))])
    tree = STRtree(bounds)
    rects = [(-900, -900, 900, 900), (0, 0, 100, 100), (-4000, -4000, 4000, 4000)]

    def run_queries(_):
        masks = [tree.query(r, np.zeros(n, np.bool_)) for r in rects]
        return np.concatenate(masks)

    bench(
        f"rtree_query n={n} x3 rects",
        lambda: None,
        run_queries,
        lambda x, y: np.testing.assert_array_equal(x, y),
        repeats,
    )

    # matching + refinement on a random graph
    n = int(100_000 * scale)
    src = rng.integers(0, n, 3 * n).astype(np.int64)
    dst = rng.integers(0, n, 3 * n).astype(np.int64)
    indptr, indices, weights = csr_from_pairs(n, *combined_pairs(n, src, dst))
    vw = np.ones(n, np.int64)
    bench(
        f"match_heavy_edge n={n}",
        lambda: None,
        lambda _: kernels.match_heavy_edge(indptr, indices, weights, vw, n),
        lambda x, y: np.testing.assert_array_equal(x, y),
        repeats,
    )
    part0 = rng.integers(0, 4, n).astype(np.int64)
    bench(
        f"refine_partition n={n} k=4",
        lambda: None,
        lambda _: kernels.refine_partition(
            indptr, indices, weights, vw, part0.copy(), 4, n, max_passes=2
        ),
        lambda x, y: np.testing.assert_array_equal(x, y),
        repeats,
    )


def _numpy_step(pos, esrc, edst, temps, cutoff):
    with kernels.use_backend("numpy"):
        return kernels.fr_run(pos, esrc, edst, 60.0, temps, cutoff)


if __name__ == "__main__":
    main()
