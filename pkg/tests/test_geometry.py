import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from apollon.geometry import (INF, DegenerateQuadruple, apollonian_cross_ratio, as_extended, cross_ratio,
                              invert_many, mobius_inversion, point_segment_distance,
                              segment_segment_distance)

coord = st.floats(-50, 50, allow_nan=False, allow_infinity=False)
point = st.tuples(coord, coord).map(np.array)


def test_cross_ratio_finite():
    a, b, c, d = map(np.array, ([0.0, 0.0], [1.0, 0.0], [3.0, 0.0], [0.0, 4.0]))
    expect = np.linalg.norm(a - c) * np.linalg.norm(b - d) / (np.linalg.norm(a - d) * np.linalg.norm(b - c))
    assert cross_ratio(a, b, c, d) == pytest.approx(expect, rel=1e-15)


def test_infinity_factors_cancel():
    b, c, d = np.array([1.0, 0.0]), np.array([3.0, 1.0]), np.array([0.0, 4.0])
    # |inf,b,c,d| = |b-d| / |b-c|
    assert cross_ratio(INF, b, c, d) == pytest.approx(np.linalg.norm(b - d) / np.linalg.norm(b - c))
    assert cross_ratio(b, INF, c, d) == pytest.approx(np.linalg.norm(b - c) / np.linalg.norm(b - d))


def test_zero_and_infinite_values():
    a, b, c = np.array([0.0, 0.0]), np.array([1.0, 0.0]), np.array([2.0, 2.0])
    assert cross_ratio(a, b, a, c) == 0.0  # a = c
    assert cross_ratio(a, b, c, a) == math.inf  # a = d
    with pytest.raises(DegenerateQuadruple):
        cross_ratio(a, a, a, c)


def test_as_extended_strings():
    assert as_extended("inf") is INF
    assert as_extended("Infinity") is INF
    with pytest.raises(ValueError):
        as_extended([1.0])


@given(point, point, point, point)
def test_cross_ratio_symmetries(a, b, c, d):
    try:
        t = cross_ratio(a, b, c, d)
    except DegenerateQuadruple:
        return
    if not (0 < t < math.inf):
        return
    assert cross_ratio(b, a, d, c) == pytest.approx(t, rel=1e-9)
    assert cross_ratio(c, d, a, b) == pytest.approx(t, rel=1e-9)


@given(point)
def test_inversion_involution(x):
    if np.linalg.norm(x) < 1e-3:
        return
    y = mobius_inversion(mobius_inversion(x))
    assert np.allclose(y, x, rtol=1e-12, atol=1e-12)


def test_inversion_swaps_center_and_infinity():
    c = np.array([1.0, 2.0])
    assert mobius_inversion(c, c) is INF
    assert np.array_equal(mobius_inversion(INF, c), c)


def test_invert_many_matches_scalar(rng):
    pts = rng.normal(size=(50, 3))
    c = np.array([0.3, -0.2, 0.1])
    got = invert_many(pts, c, 2.0)
    want = np.array([mobius_inversion(p, c, 2.0) for p in pts])
    assert np.allclose(got, want, rtol=1e-14)


def test_apollonian_cross_ratio_with_infinity():
    x, y = np.array([0.0, 1.0]), np.array([0.0, 3.0])
    a = np.array([0.0, 0.0])
    assert apollonian_cross_ratio(a, y, x, INF) == pytest.approx(1.0 / 3.0)
    assert apollonian_cross_ratio(INF, y, x, a) == pytest.approx(3.0)
    assert apollonian_cross_ratio(INF, y, x, INF) == 1.0


@given(point, point, point)
def test_point_segment_distance_brute(p, a, b):
    t = np.linspace(0, 1, 20001)
    brute = np.linalg.norm(a + t[:, None] * (b - a) - p, axis=1).min()
    got = point_segment_distance(p, a, b)[0]
    assert got <= brute + 1e-9
    assert got >= brute - np.linalg.norm(b - a) / 20000 - 1e-9


@given(point, point, point, point)
def test_segment_segment_distance_brute(p0, p1, q0, q1):
    t = np.linspace(0, 1, 401)
    P = p0 + t[:, None] * (p1 - p0)
    Q = q0 + t[:, None] * (q1 - q0)
    brute = np.linalg.norm(P[:, None] - Q[None], axis=2).min()
    got = segment_segment_distance(p0, p1, q0, q1)
    step = (np.linalg.norm(p1 - p0) + np.linalg.norm(q1 - q0)) / 400
    assert got <= brute + 1e-9
    assert got >= brute - step - 1e-9
