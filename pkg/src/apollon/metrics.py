"""Hyperbolic-type metrics: j, r, Apollonian, Seittenranta, h_{G,c} and r_G of
segments.

Sups over boundary pairs are either resolved in closed form (punctured
space, half-space, ball) or taken over ``sample_boundary(G, level)``; sampled
values are lower bounds of the true sup and are labelled ``bound="lower"``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .domains import Ball, Domain, HalfSpace, PuncturedSpace
from .geometry import as_point

EXACT_ALPHA = (PuncturedSpace, HalfSpace, Ball)
SEGMENT_SAMPLES = 200


@dataclass(frozen=True)
class MetricEstimate:
    value: float
    method: str = "exact"  # exact | sampled | grid
    bound: str = "two_sided"  # lower | upper | two_sided
    gap: float = 0.0
    level: int | None = None
    resolution: float | None = None
    flags: tuple = ()
    meta: dict = field(default_factory=dict, compare=False)

    def __float__(self):
        return float(self.value)

    @property
    def method_label(self) -> str:
        if self.method == "sampled" and self.level is not None:
            return f"sampled({self.level})"
        if self.method == "grid":
            return f"grid({self.resolution:g})"
        return self.method

    @property
    def bound_label(self) -> str:
        if self.bound == "two_sided":
            return f"two_sided({self.gap:.6g})"
        return self.bound


def _pair(G: Domain, x, y):
    return G.check_interior(x), G.check_interior(y)


def _distance_kind(G: Domain, value: float, **meta) -> MetricEstimate:
    """Estimate for quantities that are exact whenever d_G is exact.

    With approximate distances (sampled boundaries) d_G is underestimated, so
    j, r and h are overestimated.
    """
    if G.exact_distance:
        return MetricEstimate(value, meta=meta)
    return MetricEstimate(value, method="sampled", bound="upper", flags=("approximate",), meta=meta)


def r_ratio(G: Domain, x, y) -> MetricEstimate:
    x, y = _pair(G, x, y)
    dmin = float(G.dist(np.vstack([x, y])).min())
    return _distance_kind(G, float(np.linalg.norm(x - y)) / dmin)


def j_metric(G: Domain, x, y) -> MetricEstimate:
    r = r_ratio(G, x, y)
    return _distance_kind(G, math.log1p(r.value))


def h_metric(G: Domain, x, y, c: float = 2.0) -> MetricEstimate:
    if not c >= 2:
        raise ValueError(f"h_{{G,c}} needs c >= 2, got {c}")
    x, y = _pair(G, x, y)
    dx, dy = G.dist(np.vstack([x, y]))
    return _distance_kind(G, math.log1p(c * float(np.linalg.norm(x - y)) / math.sqrt(dx * dy)), c=c)


# ---------------------------------------------------------------------------
# Apollonian and Seittenranta metrics

@lru_cache(maxsize=64)
def _boundary(G: Domain, level: int):
    return G.sample_boundary(level)


def _alpha_exact(G: Domain, x: np.ndarray, y: np.ndarray) -> float:
    if isinstance(G, PuncturedSpace):
        return abs(math.log(np.linalg.norm(x - G.point) / np.linalg.norm(y - G.point)))
    if isinstance(G, HalfSpace):
        hx, hy = G.height(np.vstack([x, y]))
        s = float(np.linalg.norm(x - y)) / (2.0 * math.sqrt(hx * hy))
    else:
        R2 = G.radius**2
        px = R2 - float((x - G.center) @ (x - G.center))
        py = R2 - float((y - G.center) @ (y - G.center))
        s = G.radius * float(np.linalg.norm(x - y)) / math.sqrt(px * py)
    # hyperbolic distance: sinh(rho / 2) = s
    return 2.0 * math.asinh(s)


def alpha_sampled_sup(points: np.ndarray, with_infinity: bool, x: np.ndarray, y: np.ndarray) -> float:
    """log sup |a,y,x,b| over a finite boundary set.

    The cross ratio factors into |a-x|/|a-y| times |b-y|/|b-x|, so the sup
    over pairs is the product of two independent maxima.
    """
    if len(points):
        ra = np.linalg.norm(points - x, axis=1) / np.linalg.norm(points - y, axis=1)
        amax, bmax = float(ra.max()), float((1.0 / ra).max())
    else:
        amax = bmax = 0.0
    if with_infinity:
        amax, bmax = max(amax, 1.0), max(bmax, 1.0)
    return max(0.0, math.log(amax) + math.log(bmax))


def apollonian(G: Domain, x, y, level: int = 6, sampled: bool = False) -> MetricEstimate:
    """alpha_G(x, y) = log sup_{a, b in boundary} |a,y,x,b|.

    Closed forms are used for punctured spaces, half-spaces and balls unless
    ``sampled`` forces the boundary-sample sup.
    """
    x, y = _pair(G, x, y)
    flags = ("pseudometric",) if G.degenerate else ()
    if isinstance(G, EXACT_ALPHA) and not sampled:
        return MetricEstimate(_alpha_exact(G, x, y), flags=flags)
    if np.array_equal(x, y):
        return MetricEstimate(0.0, method="sampled", bound="lower", level=level, flags=flags)
    B = _boundary(G, level)
    val = alpha_sampled_sup(B.points, B.includes_infinity, x, y)
    if not G.exact_distance:
        flags = flags + ("approximate",)
    return MetricEstimate(val, method="sampled", bound="lower", level=level, flags=flags,
                          meta={"boundary_points": len(B)})


def seittenranta_sampled_sup(points: np.ndarray, with_infinity: bool, x: np.ndarray, y: np.ndarray,
                             chunk: int = 64) -> float:
    """sup |a,x,b,y| = sup |a-b||x-y| / (|a-y||x-b|) over a finite boundary set.

    Inverting in the unit sphere about y turns |a-b|/(|a-y||b-y|) into |ua-ub|,
    so the sup is max_b w_b * max_a |ua - ub| with w_b = |b-y|/|b-x|. The
    farthest-point term is bounded by R + |ub - c| (c the bounding-box centre),
    which orders and prunes the candidates for b; the result is the exact
    discrete max.
    """
    dxy = float(np.linalg.norm(x - y))
    if dxy == 0.0:
        return 0.0
    v = points - y
    s = np.einsum("ij,ij->i", v, v)
    u = y + v / s[:, None]
    w = np.sqrt(s) / np.linalg.norm(points - x, axis=1)
    if with_infinity:
        # infinity maps to y; its weight |b-y|/|b-x| tends to 1
        u = np.vstack([u, y])
        w = np.append(w, 1.0)
    cen = 0.5 * (u.min(axis=0) + u.max(axis=0))
    rad = np.linalg.norm(u - cen, axis=1)
    ub = w * (rad.max() + rad)
    order = np.argsort(-ub, kind="stable")
    sq = np.einsum("ij,ij->i", u - cen, u - cen)
    uc = u - cen
    best, start, size = 0.0, 0, 8
    while start < len(order):
        idx = order[start:start + size]
        if ub[idx[0]] <= best:
            break
        d2 = sq[idx][:, None] + sq[None, :] - 2.0 * (uc[idx] @ uc.T)
        far = np.sqrt(np.maximum(d2.max(axis=1), 0.0))
        best = max(best, float((w[idx] * far).max()))
        start += size
        size = min(2 * size, chunk)
    return best * dxy


def seittenranta(G: Domain, x, y, level: int = 6) -> MetricEstimate:
    """delta_G(x, y) = log(1 + sup_{a, b} |a,x,b,y|); exact on punctured spaces."""
    x, y = _pair(G, x, y)
    if isinstance(G, PuncturedSpace):
        dmin = float(np.linalg.norm(np.vstack([x, y]) - G.point, axis=1).min())
        return MetricEstimate(math.log1p(float(np.linalg.norm(x - y)) / dmin))
    B = _boundary(G, level)
    val = math.log1p(seittenranta_sampled_sup(B.points, B.includes_infinity, x, y))
    flags = () if G.exact_distance else ("approximate",)
    return MetricEstimate(val, method="sampled", bound="lower", level=level, flags=flags,
                          meta={"boundary_points": len(B)})


# ---------------------------------------------------------------------------
# r_G of a segment

def _segment_sup(G: Domain, x, y, t: np.ndarray) -> float:
    pts = x + t[:, None] * (y - x)
    d = G.dist(pts)
    L = float(np.linalg.norm(y - x))
    num = np.abs(t[:, None] - t[None, :]) * L
    return float((num / np.minimum(d[:, None], d[None, :])).max())


def r_of_segment(G: Domain, x, y, samples: int = SEGMENT_SAMPLES) -> MetricEstimate:
    """r_G([x, y]) by dense sampling of the segment, refined once.

    The parameter set always contains the point of closest approach to the
    boundary, so the value respects d(A)/(2 d(A, bdry)) <= r_G(A) <= d(A)/d(A, bdry).
    """
    x, y = as_point(x, G.dim), as_point(y, G.dim)
    dA, tstar = G.segment_closest(x, y)
    diam = float(np.linalg.norm(x - y))
    lower, upper = diam / (2.0 * dA), diam / dA
    meta = {"samples": [samples + 1, 2 * samples + 1], "diam": diam, "dist_to_boundary": dA,
            "sandwich": (lower, upper)}
    if diam == 0.0:
        return MetricEstimate(0.0, method="sampled", meta=meta)
    coarse = _segment_sup(G, x, y, np.union1d(np.linspace(0, 1, samples + 1), [tstar]))
    fine = _segment_sup(G, x, y, np.union1d(np.linspace(0, 1, 2 * samples + 1), [tstar]))
    flags = () if G.exact_distance else ("approximate",)
    return MetricEstimate(fine, method="sampled", gap=abs(fine - coarse), flags=flags, meta=meta)


METRICS = {
    "j": lambda G, x, y, **kw: j_metric(G, x, y),
    "r": lambda G, x, y, **kw: r_ratio(G, x, y),
    "h": lambda G, x, y, c=2.0, **kw: h_metric(G, x, y, c),
    "alpha": lambda G, x, y, level=6, **kw: apollonian(G, x, y, level),
    "delta": lambda G, x, y, level=6, **kw: seittenranta(G, x, y, level),
}
