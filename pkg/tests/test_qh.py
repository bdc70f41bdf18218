import math

import numpy as np
import pytest

from apollon.domains import Ball, HalfSpace, PuncturedSpace, Slab
from apollon.qh import (GridError, build_grid, qh_distance, qh_distance_exact, qh_distances_from,
                        qh_exact_values, qh_geodesic, stencil_offsets)

H = HalfSpace([0.0, 1.0], 0.0)
P = PuncturedSpace([0.0, 0.0])


def test_stencil_sizes():
    assert len(stencil_offsets(2, 1)) == 8
    assert len(stencil_offsets(3, 1)) == 26
    assert len(stencil_offsets(2, 4)) == 48
    assert all(math.gcd(*map(abs, v)) == 1 for v in stencil_offsets(2, 4))


def test_half_plane_vertical_distance():
    e = qh_distance(H, [0.0, 1.0], [0.0, math.e], 0.05, window=([-2.0, 0.0], [2.0, 4.0]))
    assert e.value == pytest.approx(1.0, abs=1e-2)
    assert e.method == "grid" and e.resolution == 0.05
    assert e.gap < 1e-2


@pytest.mark.parametrize("pair", [([0.0, 1.0], [2.0, 1.0]), ([-1.0, 0.5], [1.5, 2.0]), ([0.3, 0.2], [0.3, 3.0])])
def test_half_plane_matches_closed_form(pair):
    x, y = map(np.array, pair)
    h = 0.125 * min(x[1], y[1])
    grid = qh_distance(H, x, y, h, refine=False).value
    assert grid == pytest.approx(qh_distance_exact(H, x, y).value, rel=1e-2)


def test_punctured_closed_form_against_grid():
    rng = np.random.default_rng(20)
    for _ in range(4):
        r = rng.uniform(0.4, 1.0, 2)
        t = rng.uniform(0, 2 * np.pi, 2)
        x, y = (r[:, None] * np.column_stack([np.cos(t), np.sin(t)]))
        h = 0.1 * min(r)
        assert qh_distance(P, x, y, h, refine=False).value == pytest.approx(
            qh_exact_values(P, x[None], y[None])[0], rel=1.5e-2)


def test_disk_radial_distance():
    # along a radius the segment is a geodesic and k = log(1 / (1 - r))
    D = Ball([0.0, 0.0], 1.0)
    e = qh_distance(D, [0.0, 0.0], [0.5, 0.0], 0.01, refine=False)
    assert e.value == pytest.approx(math.log(2.0), rel=1e-2)


def test_three_dimensional_half_space():
    G = HalfSpace([0.0, 0.0, 1.0], 0.0)
    e = qh_distance(G, [0.0, 0.0, 1.0], [0.0, 0.0, 2.0], 0.1, refine=False)
    assert e.value == pytest.approx(math.log(2.0), rel=2e-2)


def test_geodesic_weight_and_endpoints():
    x, y = np.array([1.0, 0.0]), np.array([-1.0, 0.0])
    path = qh_geodesic(P, x, y, 0.05)
    assert np.array_equal(path.points[0], x) and np.array_equal(path.points[-1], y)
    assert path.weight == pytest.approx(qh_distance(P, x, y, 0.05, refine=False).value, rel=1e-12)
    assert np.all(np.diff(path.cumulative) >= 0)
    # the grid geodesic goes around the puncture
    assert np.min(np.linalg.norm(path.nodes, axis=1)) > 0.5


def test_small_window_is_flagged():
    path = qh_geodesic(P, [1.0, 0.0], [-1.0, 0.0], 0.1, window=([-1.05, -0.5], [1.05, 1.0]))
    assert path.touches_window


def test_grid_errors():
    S = Slab.along_axis(2, 1, 0.0, 0.1)
    with pytest.raises(GridError):
        build_grid(S, ([-1.0, 0.0], [1.0, 0.1]), 0.06)
    with pytest.raises(ValueError):
        qh_distance(H, [0.0, 1.0], [0.0, 2.0], 0.0)


def test_one_to_many_matches_pairwise():
    G = Ball([0.0, 0.0], 1.0)
    pts = np.array([[0.1, 0.2], [-0.3, 0.1], [0.2, -0.4]])
    grid = build_grid(G, ([-1.0, -1.0], [1.0, 1.0]), 0.02)
    many = qh_distances_from(grid, np.zeros(2), pts)
    one = [qh_distance(G, [0.0, 0.0], p, 0.02, window=([-1.0, -1.0], [1.0, 1.0]), refine=False).value for p in pts]
    assert np.allclose(many, one, rtol=1e-12)


def test_k_bounds_j_from_above():
    D = Ball([0.0, 0.0], 1.0)
    from apollon.metrics import j_metric
    for x, y in [([0.0, 0.0], [0.9, 0.0]), ([0.5, 0.5], [-0.5, -0.5])]:
        e = qh_distance(D, x, y, 0.02)
        assert j_metric(D, x, y).value <= e.value + e.gap
