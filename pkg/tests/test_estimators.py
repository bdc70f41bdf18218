import math
from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import linprog

from apollon.domains import Ball, HalfSpace, PuncturedSpace, Polygon2D
from apollon.estimators import (KBackend, MetricFault, NumericalFault, a_uniformity_ratio, fit_uniformity,
                                four_point_delta, gromov_delta_4pt, gromov_product, natural_check,
                                phi_envelope, polyline_points, quasi_isotropy, unit_directions)
from apollon.metrics import j_metric
from apollon.qh import qh_exact_values
from apollon.sampling import PairSample, pair_sample, quadruple_sample

H = HalfSpace([0.0, 1.0], 0.0)
P = PuncturedSpace([0.0, 0.0])
WIN = ([-5.0, 0.0], [5.0, 5.0])


def lexicographic_lp(k, j):
    """Oracle: minimize d, then c, subject to k_i <= c j_i + d."""
    A = -np.column_stack([j, np.ones_like(j)])
    first = linprog([0, 1], A_ub=A, b_ub=-k, bounds=[(0, None), (0, None)], method="highs")
    d = first.x[1]
    second = linprog([1, 0], A_ub=A, b_ub=-k, bounds=[(0, None), (d, d + 1e-12)], method="highs")
    return second.x


def test_uniformity_fit_matches_lp_oracle():
    S = pair_sample(H, WIN, 300, 2)
    fit = fit_uniformity(H, S)
    k = qh_exact_values(H, S.pairs[:, 0], S.pairs[:, 1])
    j = np.array([j_metric(H, x, y).value for x, y in S.pairs])
    c, d = lexicographic_lp(k, j)
    assert fit["d"] == 0.0 and d == pytest.approx(0.0, abs=1e-9)
    assert fit["c"] == pytest.approx(c, rel=1e-6)
    # the reported pair is tight
    assert fit.diagnostics["k"] == pytest.approx(fit["c"] * fit.diagnostics["j"])
    assert fit.certificate == "lower_bound_on_true_constant"


def test_uniformity_single_pair_and_doubling():
    S1 = pair_sample(H, WIN, 1, 5)
    fit = fit_uniformity(H, S1)
    assert fit["c"] == pytest.approx(fit.diagnostics["k"] / fit.diagnostics["j"])
    c = [fit_uniformity(H, pair_sample(H, WIN, n, 5))["c"] for n in (100, 200, 400)]
    assert c[0] <= c[1] <= c[2]


def test_uniformity_skips_repeated_points():
    fit = fit_uniformity(H, PairSample.from_pairs([[[0.0, 1.0], [0.0, 1.0]]]))
    assert fit["c"] == 0.0 and fit.diagnostics["pairs_used"] == 0


def test_uniformity_flags_contradiction(monkeypatch):
    import apollon.estimators as est
    monkeypatch.setattr(est, "k_values", lambda G, pairs, backend: (np.ones(len(pairs)), np.zeros(len(pairs))))
    with pytest.raises(NumericalFault, match="j = 0"):
        fit_uniformity(H, PairSample.from_pairs([[[0.0, 1.0], [0.0, 1.0]]]))


def test_disk_uniformity_uses_grid():
    D = Ball([0.0, 0.0], 1.0)
    S = pair_sample(Ball([0.0, 0.0], 0.8), ([-0.8, -0.8], [0.8, 0.8]), 6, 1)
    fit = fit_uniformity(D, S, KBackend(refine=True))
    assert 1.0 <= fit["c"] < 3.0
    assert fit.manifest["k"] == "grid"


def test_phi_envelope_monotone():
    S = pair_sample(H, WIN, 400, 0)
    fit = phi_envelope(H, S, bins=8)
    phi = [row["phi"] for row in fit.table]
    assert all(b >= a for a, b in zip(phi, phi[1:]))
    assert sum(row["count"] for row in fit.table) == 400


def test_a_ratio_unbounded_on_punctured_plane():
    S = PairSample.from_pairs(np.array([[[1.0, 0.0], [-1.0, 0.0]], [[1.0, 1.0], [2.0, 2.0]]]))
    fit = a_uniformity_ratio(P, S)
    assert fit["unbounded"] and len(fit.diagnostics["witnesses"]) == 1


def test_a_ratio_half_plane_is_one():
    fit = a_uniformity_ratio(H, pair_sample(H, WIN, 100, 0))
    assert not fit["unbounded"] and fit["sup"] == pytest.approx(1.0)


coord = st.floats(0.0, 10.0)


def brute_four_point(d):
    """max over the 24 relabelings of the four-point defect."""
    D = np.zeros((4, 4))
    for (a, b), v in zip([(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], d):
        D[a, b] = D[b, a] = v
    best = -np.inf
    for x, y, z, w in permutations(range(4)):
        gp = lambda a, b: 0.5 * (D[a, w] + D[b, w] - D[a, b])
        best = max(best, min(gp(x, z), gp(z, y)) - gp(x, y))
    return best


@given(st.lists(coord, min_size=6, max_size=6))
def test_four_point_matches_relabeling_brute_force(d):
    assert four_point_delta(np.array([d]))[0] == pytest.approx(brute_four_point(d), abs=1e-9)


def test_gromov_product_definition():
    assert gromov_product(3.0, 2.0, 2.0) == 0.5


def test_gromov_half_plane_bounded():
    Q = quadruple_sample(H, WIN, 2000, 7)
    fit = gromov_delta_4pt(H, Q)
    assert 0 < fit["delta"] < math.log(3) + 1
    assert fit.diagnostics["skipped"] == 0


def test_gromov_tree_like_metric_is_zero():
    # points on a hyperbolic geodesic: four-point delta is 0
    pts = np.column_stack([np.zeros(6), np.geomspace(0.1, 10, 6)])
    idx = np.array([[0, 1, 2, 3], [1, 3, 4, 5], [0, 2, 4, 5]])
    from apollon.sampling import QuadrupleSample, Window
    fit = gromov_delta_4pt(H, QuadrupleSample(0, Window([-1, 0], [1, 11]), pts, idx))
    assert fit["delta"] == pytest.approx(0.0, abs=1e-12)


def test_gromov_grid_requires_resolution():
    D = Ball([0.0, 0.0], 1.0)
    Q = quadruple_sample(D, ([-0.5, -0.5], [0.5, 0.5]), 3, 0, pool=6)
    with pytest.raises(ValueError):
        gromov_delta_4pt(D, Q, KBackend("grid"))
    fit = gromov_delta_4pt(D, Q, KBackend("grid", h=0.05))
    assert fit["delta"] >= 0


def test_unit_directions():
    E = unit_directions(2, 16)
    assert np.allclose(np.linalg.norm(E, axis=1), 1)
    E3 = unit_directions(3, 50)
    assert E3.shape == (50, 3) and np.allclose(np.linalg.norm(E3, axis=1), 1)


def test_quasi_isotropy_half_plane():
    fit = quasi_isotropy(H, [0.0, 1.0], [0.4, 0.1, 0.01])
    assert fit["L"] == pytest.approx(1.0, abs=0.03)
    assert fit["trend"] == "nonincreasing"
    with pytest.raises(ValueError):
        quasi_isotropy(H, [0.0, 1.0], [0.1, 0.4])
    with pytest.raises(ValueError):
        quasi_isotropy(H, [0.0, 1.0], [0.6])


def test_natural_check_reports_values():
    sq = Polygon2D(np.array([[0, 0], [4, 0], [4, 4], [0, 4.0]]))
    A = [[1.0, 1.0], [3.0, 1.0], [3.0, 3.0]]
    fit = natural_check(sq, A, h=0.05)
    assert fit.certificate == "report"
    assert fit["r"] > 0 and fit["k"] > 0
    assert len(polyline_points(A, 4)) == 9


def test_metric_fault_names_pair():
    sq = Polygon2D(np.array([[0, 0], [1, 0], [1, 1], [0, 1.0]]))
    S = PairSample.from_pairs(np.array([[[0.5, 0.5], [0.52, 0.5]]]))
    with pytest.raises(MetricFault, match=r"pair 0 \(\[0.5, 0.5\]"):
        fit_uniformity(sq, S, KBackend("grid", h=0.6))
