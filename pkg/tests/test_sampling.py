import numpy as np
import pytest
from hypothesis import given, strategies as st

from apollon.domains import Ball, HalfSpace, PuncturedSpace
from apollon.sampling import (Window, closure_quadruples, local_pair_sample, pair_sample, quadruple_sample)
from apollon.geometry import INF

H = HalfSpace([0.0, 1.0], 0.0)


@given(st.integers(0, 2**31), st.integers(1, 600))
def test_pair_samples_are_prefix_nested(seed, n):
    small = pair_sample(H, ([-5, 0], [5, 5]), n, seed).pairs
    big = pair_sample(H, ([-5, 0], [5, 5]), 2 * n, seed).pairs
    assert np.array_equal(big[:n], small)


def test_samples_are_interior_and_in_window():
    D = Ball([0.0, 0.0], 1.0)
    S = pair_sample(D, ([-1, -1], [0, 1]), 300, 4)
    pts = S.pairs.reshape(-1, 2)
    assert np.all(D.contains(pts)) and np.all(pts[:, 0] <= 0)
    assert S.manifest()["seed"] == 4 and S.manifest()["count"] == 300


def test_local_pairs_respect_ratio():
    S = local_pair_sample(H, ([-5, 0], [5, 5]), 500, 1)
    x, y = S.pairs[:, 0], S.pairs[:, 1]
    assert np.all(np.linalg.norm(x - y, axis=1) <= 0.5 * H.dist(x) + 1e-12)


def test_window_validation():
    with pytest.raises(ValueError):
        Window([0, 0], [0, 1])
    with pytest.raises(ValueError, match="stalled"):
        pair_sample(Ball([0.0, 0.0], 1e-4), ([-10, -10], [10, 10]), 10, 0)


def test_quadruple_modes():
    Q = quadruple_sample(H, ([-5, 0], [5, 5]), 10, 0)
    assert Q.quads().shape == (10, 4, 2) and len(np.unique(Q.index)) == 40
    Q = quadruple_sample(H, ([-5, 0], [5, 5]), None, 0, pool=8)
    assert len(Q) == 70
    Q = quadruple_sample(H, ([-5, 0], [5, 5]), 25, 0, pool=8)
    assert all(len(set(r)) == 4 for r in Q.index)


def test_closure_quadruples_include_boundary_and_infinity():
    P = PuncturedSpace([0.0, 0.0])
    quads = closure_quadruples(P, ([-1, -1], [1, 1]), 400, 3, p_boundary=0.4)
    flat = [p for q in quads for p in q]
    assert any(p is INF for p in flat)
    assert any(p is not INF and np.allclose(p, 0) for p in flat)
