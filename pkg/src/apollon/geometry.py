"""Points of the Moebius space R^n u {inf}, cross ratios and inversions."""

from __future__ import annotations

import math
from typing import Union

import numpy as np


class _Infinity:
    """The point at infinity. Use the module singleton ``INF``."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()

ExtendedPoint = Union[np.ndarray, _Infinity]


class DegenerateQuadruple(ValueError):
    """Coincident points make a cross ratio 0/0."""


def is_inf(p) -> bool:
    return p is INF


def as_point(p, dim: int | None = None) -> np.ndarray:
    """Coerce to a finite float64 point of dimension >= 2."""
    if p is INF:
        raise ValueError("expected a finite point, got INF")
    arr = np.asarray(p, dtype=float).reshape(-1)
    if arr.size < 2:
        raise ValueError(f"points need dimension >= 2, got {arr.size}")
    if dim is not None and arr.size != dim:
        raise ValueError(f"point has dimension {arr.size}, expected {dim}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"non-finite coordinates {arr}")
    return arr


def as_extended(p, dim: int | None = None) -> ExtendedPoint:
    if p is INF or (isinstance(p, str) and p.lower() in ("inf", "infinity")):
        return INF
    return as_point(p, dim)


def _factor(p, q):
    # (value, order): order +1 for a factor containing exactly one infinity,
    # -1 for a vanishing factor, 0 otherwise.
    if p is INF and q is INF:
        return 0.0, -1
    if p is INF or q is INF:
        return 1.0, 1
    d = float(np.linalg.norm(p - q))
    if d == 0.0:
        return 0.0, -1
    return d, 0


def cross_ratio(a, b, c, d) -> float:
    """|a,b,c,d| = |a-c||b-d| / (|a-d||b-c|) on extended points.

    A point at infinity occurs in one numerator and one denominator factor;
    the two cancel. Returns ``math.inf`` when a denominator vanishes for
    distinct points and raises ``DegenerateQuadruple`` on 0/0.
    """
    a, b, c, d = (as_extended(p) for p in (a, b, c, d))
    n1, o1 = _factor(a, c)
    n2, o2 = _factor(b, d)
    d1, p1 = _factor(a, d)
    d2, p2 = _factor(b, c)
    if -1 in (o1, o2) and -1 in (p1, p2):
        raise DegenerateQuadruple("coincident points give 0/0 in the cross ratio")
    order = (o1 + o2) - (p1 + p2)
    if order > 0:
        return math.inf
    if order < 0:
        return 0.0
    num = (n1 if o1 == 0 else 1.0) * (n2 if o2 == 0 else 1.0)
    den = (d1 if p1 == 0 else 1.0) * (d2 if p2 == 0 else 1.0)
    return num / den


def apollonian_cross_ratio(a, y, x, b) -> float:
    """|a,y,x,b| = |a-x||b-y| / (|a-y||b-x|) for boundary points a, b.

    Ratios containing infinity are 1. ``a == b`` gives 1.
    """
    a, b = as_extended(a), as_extended(b)
    x, y = as_point(x), as_point(y)
    for p in (a, b):
        if p is not INF and (np.array_equal(p, x) or np.array_equal(p, y)):
            raise ValueError("x and y must be interior points distinct from a and b")
    ra = 1.0 if a is INF else float(np.linalg.norm(a - x) / np.linalg.norm(a - y))
    rb = 1.0 if b is INF else float(np.linalg.norm(b - y) / np.linalg.norm(b - x))
    return ra * rb


def mobius_inversion(x, center=None, radius: float = 1.0) -> ExtendedPoint:
    """Inversion in the sphere S(center, radius); swaps center and INF."""
    if radius <= 0:
        raise ValueError("inversion radius must be positive")
    if x is INF:
        if center is None:
            raise ValueError("need a center to invert INF")
        return as_point(center).copy()
    x = as_point(x)
    c = np.zeros_like(x) if center is None else as_point(center, x.size)
    v = x - c
    s = float(v @ v)
    if s == 0.0:
        return INF
    return c + (radius * radius / s) * v


def invert_many(pts: np.ndarray, center: np.ndarray, radius: float = 1.0) -> np.ndarray:
    """Vectorized inversion of finite points; none may equal the center."""
    v = pts - center
    s = np.einsum("ij,ij->i", v, v)
    return center + (radius * radius / s)[:, None] * v


def point_segment_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distances from points ``p`` (m, n) to the segment [a, b]."""
    p = np.atleast_2d(p)
    ab = b - a
    L2 = float(ab @ ab)
    if L2 == 0.0:
        return np.linalg.norm(p - a, axis=1)
    t = np.clip((p - a) @ ab / L2, 0.0, 1.0)
    return np.linalg.norm(p - (a + t[:, None] * ab), axis=1)


def segment_segment_distance(p0, p1, q0, q1) -> float:
    """Euclidean distance between two segments in R^n."""
    p0, p1, q0, q1 = (np.asarray(v, dtype=float) for v in (p0, p1, q0, q1))
    u, v, w = p1 - p0, q1 - q0, p0 - q0
    a, b, c, d, e = u @ u, u @ v, v @ v, u @ w, v @ w
    den = a * c - b * b
    candidates = []
    if a > 0 and c > 0 and den > 1e-14 * a * c:
        s = (b * e - c * d) / den
        t = (a * e - b * d) / den
        if 0.0 <= s <= 1.0 and 0.0 <= t <= 1.0:
            candidates.append(float(np.linalg.norm(w + s * u - t * v)))
    candidates.extend(point_segment_distance(np.vstack([p0, p1]), q0, q1).tolist())
    candidates.extend(point_segment_distance(np.vstack([q0, q1]), p0, p1).tolist())
    return min(candidates)
