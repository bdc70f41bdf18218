import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from apollon.domains import Ball, HalfSpace, Polygon2D, PuncturedSpace, Slab
from apollon.geometry import INF, apollonian_cross_ratio, cross_ratio
from apollon.metrics import (alpha_sampled_sup, apollonian, h_metric, j_metric, r_of_segment, r_ratio,
                             seittenranta, seittenranta_sampled_sup)

H = HalfSpace([0.0, 1.0], 0.0)
D = Ball([0.0, 0.0], 1.0)
P = PuncturedSpace([0.0, 0.0])

upper = st.tuples(st.floats(-5, 5), st.floats(0.05, 5)).map(np.array)
in_disk = st.tuples(st.floats(0, 0.95), st.floats(0, 2 * math.pi)).map(
    lambda t: np.array([t[0] * math.cos(t[1]), t[0] * math.sin(t[1])]))


def rho_half_plane(x, y):
    # independent oracle: cosh rho = 1 + |x-y|^2 / (2 x2 y2)
    return math.acosh(1 + float(np.sum((x - y) ** 2)) / (2 * x[1] * y[1]))


def rho_disk(x, y):
    return math.acosh(1 + 2 * float(np.sum((x - y) ** 2)) / ((1 - x @ x) * (1 - y @ y)))


def test_j_forced_value():
    assert j_metric(H, [0.0, 1.0], [0.0, math.e]).value == pytest.approx(1.0, abs=1e-15)


def test_r_and_h_formulas():
    x, y = np.array([0.0, 1.0]), np.array([3.0, 4.0])
    assert r_ratio(H, x, y).value == pytest.approx(math.hypot(3, 3))
    assert h_metric(H, x, y, 5.0).value == pytest.approx(math.log(1 + 5 * math.hypot(3, 3) / 2.0))
    with pytest.raises(ValueError):
        h_metric(H, x, y, 1.0)


@given(upper, upper)
def test_alpha_half_plane_is_hyperbolic(x, y):
    assert apollonian(H, x, y).value == pytest.approx(rho_half_plane(x, y), rel=1e-9, abs=1e-9)


@given(in_disk, in_disk)
def test_alpha_disk_is_hyperbolic(x, y):
    assert apollonian(D, x, y).value == pytest.approx(rho_disk(x, y), rel=1e-7, abs=1e-7)


def test_alpha_punctured_closed_form():
    assert apollonian(P, [1.0, 0.0], [-1.0, 0.0]).value == 0.0
    assert apollonian(P, [2.0, 0.0], [0.0, 0.5]).value == pytest.approx(math.log(4.0))


def brute_alpha(points, with_inf, x, y):
    B = list(points) + ([INF] if with_inf else [])
    return max(0.0, max(math.log(apollonian_cross_ratio(a, y, x, b)) for a, b in product(B, B)))


def brute_delta(points, with_inf, x, y):
    B = list(points) + ([INF] if with_inf else [])
    best = 0.0
    for a, b in product(B, B):
        if a is INF and b is INF:
            continue
        best = max(best, cross_ratio(a, x, b, y))
    return best


@pytest.mark.parametrize("with_inf", [False, True])
def test_sampled_sups_match_brute_force(with_inf, rng):
    pts = rng.normal(size=(30, 2)) * 3
    for _ in range(20):
        x, y = rng.normal(size=(2, 2))
        assert alpha_sampled_sup(pts, with_inf, x, y) == pytest.approx(brute_alpha(pts, with_inf, x, y), rel=1e-12)
        assert seittenranta_sampled_sup(pts, with_inf, x, y) == pytest.approx(brute_delta(pts, with_inf, x, y),
                                                                              rel=1e-12)


def test_sampled_alpha_is_monotone_lower_bound(rng):
    for _ in range(10):
        x, y = rng.uniform(-0.7, 0.7, size=(2, 2))
        exact = apollonian(D, x, y).value
        vals = [apollonian(D, x, y, level, sampled=True).value for level in range(2, 9)]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
        assert vals[-1] <= exact + 1e-12
        assert vals[-1] == pytest.approx(exact, rel=1e-3, abs=1e-6)


def test_sampled_estimates_are_labelled():
    e = apollonian(D, [0.1, 0.0], [0.0, 0.3], level=5, sampled=True)
    assert (e.method, e.bound, e.level) == ("sampled", "lower", 5)
    assert e.method_label == "sampled(5)"
    assert "pseudometric" in e.flags


def test_seittenranta_punctured_exact_and_sampled_agree():
    sq = Polygon2D(np.array([[-1, -1], [1, -1], [1, 1], [-1, 1.0]]))
    x, y = np.array([0.2, 0.1]), np.array([-0.3, 0.4])
    vals = [seittenranta(sq, x, y, lv).value for lv in (3, 5, 7)]
    assert vals[0] <= vals[1] + 1e-12 <= vals[2] + 2e-12
    x, y = np.array([1.0, 0.5]), np.array([-2.0, 0.3])
    exact = seittenranta(P, x, y).value
    assert exact == pytest.approx(math.log1p(np.linalg.norm(x - y) / np.linalg.norm(x)))


@given(upper, upper, upper)
def test_j_triangle_inequality(x, y, z):
    j = lambda a, b: j_metric(H, a, b).value
    assert j(x, z) <= j(x, y) + j(y, z) + 1e-12


def test_r_of_segment_sandwich():
    S = Slab.along_axis(2, 1, 0.0, 1.0)
    e = r_of_segment(S, [0.0, 0.2], [1.0, 0.4])
    lo, hi = e.meta["sandwich"]
    assert lo <= e.value <= hi
    # brute force over a fine parameter grid
    t = np.linspace(0, 1, 4001)
    pts = np.array([0.0, 0.2]) + t[:, None] * np.array([1.0, 0.2])
    d = S.dist(pts)
    brute = (np.abs(t[:, None] - t[None]) * math.hypot(1, 0.2) / np.minimum(d[:, None], d[None])).max()
    assert e.value == pytest.approx(brute, rel=1e-3)
