"""Exact segment/rectangle overlap versus the Liang-Barsky oracle."""

import numpy as np
import pytest

import oracles
from graphatlas import kernels


def _mask_one(x1, y1, x2, y2, rect):
    return bool(kernels.segment_rect_mask(
        np.array([x1], float), np.array([y1], float),
        np.array([x2], float), np.array([y2], float), rect,
    )[0])


WINDOW = (0.0, 0.0, 2.0, 2.0)


@pytest.mark.parametrize("seg,expect", [
    ((1, 1, 3, 3), True),          # endpoint inside
    ((5, 5, 6, 6), False),         # fully outside
    ((-1, 1, 3, 1), True),         # crosses with both endpoints outside
    ((2, 2, 5, 5), True),          # touches the corner
    ((0, -1, 0, 3), True),         # runs along the left border
    ((-3, 0, 0, 3.5), False),      # diagonal misses the box
    ((2.0001, 0, 3, 0), False),    # just past the right edge
    ((1, 1, 1, 1), True),          # degenerate point inside
    ((3, 3, 3, 3), False),         # degenerate point outside
    ((2, 1, 2, 1), True),          # degenerate point on the border
])
def test_window_cases(seg, expect):
    assert _mask_one(*seg, WINDOW) is expect
    assert oracles.segment_in_rect(*seg, WINDOW) is expect


def test_fuzz_against_liang_barsky():
    rng = np.random.default_rng(123)
    for _ in range(40):
        n = 500
        a = rng.uniform(-50, 50, (n, 2))
        b = a + rng.uniform(-30, 30, (n, 2))
        pointlike = rng.random(n) < 0.25
        b[pointlike] = a[pointlike]
        c = rng.uniform(-50, 50, 2)
        w, h = rng.uniform(0.5, 40, 2)
        rect = (c[0] - w, c[1] - h, c[0] + w, c[1] + h)
        got = kernels.segment_rect_mask(a[:, 0], a[:, 1], b[:, 0], b[:, 1], rect)
        expect = np.array([
            oracles.segment_in_rect(a[i, 0], a[i, 1], b[i, 0], b[i, 1], rect)
            for i in range(n)
        ])
        assert np.array_equal(got, expect)


def test_axis_aligned_grid_segments():
    # integer lattice segments against fractional windows; no boundary traps
    xs = np.arange(10.0)
    x1 = np.repeat(xs, 10)
    y1 = np.tile(xs, 10)
    x2 = x1 + 1.0
    y2 = y1
    rect = (2.5, 1.5, 4.5, 3.5)
    got = kernels.segment_rect_mask(x1, y1, x2, y2, rect)
    expect = np.array([
        oracles.segment_in_rect(a, b, c, d, rect)
        for a, b, c, d in zip(x1, y1, x2, y2)
    ])
    assert np.array_equal(got, expect)
    assert got.sum() == 6
