"""Proper subdomains of R^n: distance to the boundary, membership and
deterministic boundary sampling.

Every variant supplies a vectorized ``dist`` (distance to the boundary) and
``contains``. ``sample_boundary(level)`` returns a nested family of boundary
samples used to discretize sups over boundary points.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .geometry import INF, as_point, point_segment_distance, segment_segment_distance

VARIANTS = ("half_space", "ball", "punctured", "slab", "polygon2d", "lattice_complement", "sampled")

# Level-0 boundary sample sizes; counts double (curves) or quadruple (surfaces)
# per level.
CIRCLE_BASE = 64
POLYGON_EDGE_BASE = 8
LATTICE_BASE = 32
SPHERE_LAT_BASE = 8
SPHERE_LON_BASE = 32


class DomainError(ValueError):
    """A point or set is not where the operation requires it to be."""


class SpecError(ValueError):
    """Malformed domain or map specification."""


class SegmentExitsDomain(DomainError):
    def __init__(self, t: float):
        super().__init__(f"segment leaves the domain at parameter t={t:.6g}")
        self.t = t


@dataclass(frozen=True)
class BoundarySample:
    points: np.ndarray  # (m, n) finite boundary points
    level: int
    includes_infinity: bool

    def __len__(self):
        return len(self.points) + int(self.includes_infinity)

    def as_list(self) -> list:
        out = [p for p in self.points]
        if self.includes_infinity:
            out.append(INF)
        return out


# ---------------------------------------------------------------------------
# sampling helpers

def _circle(N: int, phase: float = 0.0) -> np.ndarray:
    t = phase + 2.0 * np.pi * np.arange(N) / N
    return np.column_stack([np.cos(t), np.sin(t)])


def _sphere2(level: int) -> np.ndarray:
    """Nested latitude/longitude node set on S^2; index 0 is the north pole."""
    m = SPHERE_LAT_BASE * 2**level
    k = SPHERE_LON_BASE * 2**level
    th = np.pi * np.arange(1, m) / m
    ph = 2.0 * np.pi * np.arange(k) / k
    T, P = np.meshgrid(th, ph, indexing="ij")
    body = np.column_stack([(np.sin(T) * np.cos(P)).ravel(), (np.sin(T) * np.sin(P)).ravel(), np.cos(T).ravel()])
    return np.vstack([[0.0, 0.0, 1.0], body, [0.0, 0.0, -1.0]])


def _unit_sphere(dim: int, level: int) -> np.ndarray:
    """Nested sample of S^{dim-1}; row 0 is the north pole e_dim."""
    if dim == 2:
        return _circle(CIRCLE_BASE * 2**level, phase=np.pi / 2)
    if dim == 3:
        return _sphere2(level)
    raise ValueError(f"boundary sampling supports dimensions 2 and 3, got {dim}")


def _hyperplane_basis(normal: np.ndarray) -> np.ndarray:
    """Orthonormal basis (rows) of the orthogonal complement of ``normal``."""
    n = normal.size
    # Householder-free: complete via QR with the normal first
    M = np.eye(n)
    M[:, 0] = normal
    q, _ = np.linalg.qr(M)
    basis = q[:, 1:].T
    return basis


def _plane_points(normal, offset, level, scale=1.0) -> np.ndarray:
    """Stereographic image of the nested sphere sample on {x.n = offset}.

    The north pole goes to infinity and is dropped.
    """
    dim = normal.size
    s = _unit_sphere(dim, level)[1:]
    proj = s[:, :-1] / (1.0 - s[:, -1])[:, None]
    basis = _hyperplane_basis(normal)
    return offset * normal + scale * proj @ basis


# ---------------------------------------------------------------------------

class Domain:
    """Base class. Subclasses are frozen dataclasses."""

    variant = ""
    exact_distance = True

    @property
    def dim(self) -> int:
        raise NotImplementedError

    @property
    def unbounded(self) -> bool:
        raise NotImplementedError

    @property
    def degenerate(self) -> bool:
        """True when the boundary lies in a hyperplane or sphere."""
        return False

    def dist(self, pts) -> np.ndarray:
        raise NotImplementedError

    def contains(self, pts) -> np.ndarray:
        raise NotImplementedError

    def sample_boundary(self, level: int) -> BoundarySample:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def bounding_box(self):
        """(lo, hi) containing the domain, or None when unbounded."""
        return None

    def _segment_dist(self, x, y) -> float:
        raise NotImplementedError

    # -- shared

    def _pts(self, pts) -> np.ndarray:
        a = np.asarray(pts, dtype=float)
        if a.ndim == 1:
            a = a[None, :]
        if a.shape[1] != self.dim:
            raise DomainError(f"points have dimension {a.shape[1]}, domain has {self.dim}")
        return a

    def check_interior(self, x) -> np.ndarray:
        x = as_point(x, self.dim)
        if not bool(self.contains(x)[0]):
            raise DomainError(f"point {x.tolist()} is not in the domain")
        if not self.dist(x)[0] > 0:
            raise DomainError(f"point {x.tolist()} is on or too close to the boundary")
        return x

    def dist_to_boundary(self, x) -> float:
        x = self.check_interior(x)
        return float(self.dist(x)[0])

    def segment_distance(self, x, y) -> float:
        """dist([x, y], boundary); raises SegmentExitsDomain if [x, y] is not in G."""
        return self.segment_closest(x, y)[0]

    def segment_closest(self, x, y) -> tuple[float, float]:
        """(dist([x, y], boundary), parameter t in [0, 1] where it is attained)."""
        x, y = self.check_interior(x), self.check_interior(y)
        d, t = self._segment_dist(x, y)
        if d <= 0.0:
            raise SegmentExitsDomain(self._first_exit(x, y))
        return d, t

    def _first_exit(self, x, y) -> float:
        t = np.linspace(0.0, 1.0, 4097)
        pts = x + t[:, None] * (y - x)
        bad = ~self.contains(pts) | (self.dist(pts) <= 0)
        idx = np.flatnonzero(bad)
        if idx.size == 0:
            return 1.0
        lo, hi = t[idx[0] - 1], t[idx[0]]
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            p = x + mid * (y - x)
            if bool(self.contains(p)[0]) and self.dist(p)[0] > 0:
                lo = mid
            else:
                hi = mid
        return float(hi)

    def spec_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def _endpoint_min(G, x, y):
    dx, dy = G.dist(np.vstack([x, y]))
    return (float(dx), 0.0) if dx <= dy else (float(dy), 1.0)


def _closest_on_segment(pts, x, y):
    """Min distance from point set to [x, y] and the segment parameter attaining it."""
    v = y - x
    L2 = float(v @ v)
    t = np.zeros(len(pts)) if L2 == 0 else np.clip((pts - x) @ v / L2, 0.0, 1.0)
    d = np.linalg.norm(pts - (x + t[:, None] * v), axis=1)
    i = int(np.argmin(d))
    return float(d[i]), float(t[i])


def _closest_param(x, y, a, b):
    """Parameter on [x, y] of the closest approach to segment [a, b]."""
    t = np.linspace(0.0, 1.0, 65)
    for _ in range(4):
        pts = x + t[:, None] * (y - x)
        d = point_segment_distance(pts, a, b)
        i = int(np.argmin(d))
        lo, hi = t[max(i - 1, 0)], t[min(i + 1, len(t) - 1)]
        t = np.linspace(lo, hi, 65)
    pts = x + t[:, None] * (y - x)
    return float(t[int(np.argmin(point_segment_distance(pts, a, b)))])


def _vec(v) -> list:
    return [float(c) for c in np.asarray(v).ravel()]


@dataclass(frozen=True, eq=False)
class HalfSpace(Domain):
    """{x : x . normal > offset} with ``normal`` normalized on construction."""

    normal: np.ndarray
    offset: float = 0.0
    variant = "half_space"

    def __post_init__(self):
        n = as_point(self.normal)
        L = float(np.linalg.norm(n))
        if L == 0:
            raise SpecError("field 'normal': zero vector")
        object.__setattr__(self, "normal", n / L)
        object.__setattr__(self, "offset", float(self.offset) / L)

    dim = property(lambda self: self.normal.size)
    unbounded = property(lambda self: True)
    degenerate = property(lambda self: True)

    def height(self, pts) -> np.ndarray:
        return self._pts(pts) @ self.normal - self.offset

    def dist(self, pts):
        return np.abs(self.height(pts))

    def contains(self, pts):
        return self.height(pts) > 0

    def _segment_dist(self, x, y):
        return _endpoint_min(self, x, y)

    def sample_boundary(self, level):
        return BoundarySample(_plane_points(self.normal, self.offset, level), level, True)

    def to_dict(self):
        return {"variant": self.variant, "dim": self.dim, "normal": _vec(self.normal), "offset": self.offset}


@dataclass(frozen=True, eq=False)
class Ball(Domain):
    center: np.ndarray
    radius: float = 1.0
    variant = "ball"

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        if not self.radius > 0:
            raise SpecError("field 'radius': must be positive")
        object.__setattr__(self, "radius", float(self.radius))

    dim = property(lambda self: self.center.size)
    unbounded = property(lambda self: False)
    degenerate = property(lambda self: True)

    def dist(self, pts):
        return np.abs(self.radius - np.linalg.norm(self._pts(pts) - self.center, axis=1))

    def contains(self, pts):
        return np.linalg.norm(self._pts(pts) - self.center, axis=1) < self.radius

    def _segment_dist(self, x, y):
        # distance to the sphere is concave along segments inside the ball
        return _endpoint_min(self, x, y)

    def bounding_box(self):
        return self.center - self.radius, self.center + self.radius

    def sample_boundary(self, level):
        s = _unit_sphere(self.dim, level)
        return BoundarySample(self.center + self.radius * s, level, False)

    def to_dict(self):
        return {"variant": self.variant, "dim": self.dim, "center": _vec(self.center), "radius": self.radius}


@dataclass(frozen=True, eq=False)
class PuncturedSpace(Domain):
    point: np.ndarray
    variant = "punctured"

    def __post_init__(self):
        object.__setattr__(self, "point", as_point(self.point))

    dim = property(lambda self: self.point.size)
    unbounded = property(lambda self: True)
    degenerate = property(lambda self: True)

    def dist(self, pts):
        return np.linalg.norm(self._pts(pts) - self.point, axis=1)

    def contains(self, pts):
        return self.dist(pts) > 0

    def _segment_dist(self, x, y):
        return _closest_on_segment(self.point[None, :], x, y)

    def _first_exit(self, x, y):
        v = y - x
        return float(np.clip((self.point - x) @ v / (v @ v), 0.0, 1.0))

    def sample_boundary(self, level):
        return BoundarySample(self.point[None, :].copy(), level, True)

    def to_dict(self):
        return {"variant": self.variant, "dim": self.dim, "point": _vec(self.point)}


@dataclass(frozen=True, eq=False)
class Slab(Domain):
    """{x : low < x . normal < high}."""

    normal: np.ndarray
    low: float = 0.0
    high: float = 1.0
    variant = "slab"

    def __post_init__(self):
        n = as_point(self.normal)
        L = float(np.linalg.norm(n))
        if L == 0:
            raise SpecError("field 'normal': zero vector")
        if not float(self.low) < float(self.high):
            raise SpecError("fields 'low'/'high': need low < high")
        object.__setattr__(self, "normal", n / L)
        object.__setattr__(self, "low", float(self.low) / L)
        object.__setattr__(self, "high", float(self.high) / L)

    @classmethod
    def along_axis(cls, dim: int, axis: int, low: float, high: float) -> "Slab":
        n = np.zeros(dim)
        n[axis] = 1.0
        return cls(n, low, high)

    dim = property(lambda self: self.normal.size)
    unbounded = property(lambda self: True)

    def dist(self, pts):
        h = self._pts(pts) @ self.normal
        return np.minimum(np.abs(h - self.low), np.abs(self.high - h))

    def contains(self, pts):
        h = self._pts(pts) @ self.normal
        return (h > self.low) & (h < self.high)

    def _segment_dist(self, x, y):
        return _endpoint_min(self, x, y)

    def sample_boundary(self, level):
        pts = np.vstack([
            _plane_points(self.normal, self.low, level),
            _plane_points(self.normal, self.high, level),
        ])
        return BoundarySample(pts, level, True)

    def to_dict(self):
        return {"variant": self.variant, "dim": self.dim, "normal": _vec(self.normal),
                "low": self.low, "high": self.high}


def _segments_cross(p, q, r, s) -> bool:
    def orient(a, b, c):
        return np.sign((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
    return orient(p, q, r) * orient(p, q, s) < 0 and orient(r, s, p) * orient(r, s, q) < 0


@dataclass(frozen=True, eq=False)
class Polygon2D(Domain):
    """Simple polygon; the domain lies to the left of the directed boundary.

    ``orientation="ccw"`` gives the bounded interior, ``"cw"`` the exterior.
    Vertices are reordered to match the requested orientation.
    """

    vertices: np.ndarray
    orientation: str = "ccw"
    variant = "polygon2d"

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise SpecError("field 'vertices': need at least three 2D vertices")
        if self.orientation not in ("ccw", "cw"):
            raise SpecError(f"field 'orientation': expected 'ccw' or 'cw', got {self.orientation!r}")
        area = 0.5 * np.sum(v[:, 0] * np.roll(v[:, 1], -1) - np.roll(v[:, 0], -1) * v[:, 1])
        if area == 0:
            raise SpecError("field 'vertices': degenerate polygon")
        if (area > 0) != (self.orientation == "ccw"):
            v = v[::-1].copy()
        m = len(v)
        for i in range(m):
            for j in range(i + 1, m):
                if j == i + 1 or (i == 0 and j == m - 1):
                    continue
                if _segments_cross(v[i], v[(i + 1) % m], v[j], v[(j + 1) % m]):
                    raise SpecError("field 'vertices': polygon is not simple")
        object.__setattr__(self, "vertices", v)

    dim = property(lambda self: 2)
    unbounded = property(lambda self: self.orientation == "cw")

    def edges(self):
        v = self.vertices
        return v, np.roll(v, -1, axis=0)

    def dist(self, pts):
        p = self._pts(pts)
        a, b = self.edges()
        out = np.full(len(p), np.inf)
        for ai, bi in zip(a, b):
            out = np.minimum(out, point_segment_distance(p, ai, bi))
        return out

    def _inside_polygon(self, p):
        a, b = self.edges()
        inside = np.zeros(len(p), dtype=bool)
        for ai, bi in zip(a, b):
            cond = (ai[1] > p[:, 1]) != (bi[1] > p[:, 1])
            with np.errstate(divide="ignore", invalid="ignore"):
                xint = ai[0] + (p[:, 1] - ai[1]) * (bi[0] - ai[0]) / (bi[1] - ai[1])
            inside ^= cond & (p[:, 0] < xint)
        return inside

    def contains(self, pts):
        p = self._pts(pts)
        inside = self._inside_polygon(p)
        on = self.dist(p) == 0
        return (inside if self.orientation == "ccw" else ~inside) & ~on

    def _segment_dist(self, x, y):
        a, b = self.edges()
        best = (np.inf, 0.0)
        for ai, bi in zip(a, b):
            # a proper crossing is decided exactly; the distance formula can leave ~1e-16
            d = 0.0 if _segments_cross(x, y, ai, bi) else segment_segment_distance(x, y, ai, bi)
            if d < best[0]:
                best = (d, _closest_param(x, y, ai, bi))
        return best

    def bounding_box(self):
        if self.unbounded:
            return None
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def sample_boundary(self, level):
        k = POLYGON_EDGE_BASE * 2**level
        t = np.arange(k) / k
        a, b = self.edges()
        pts = (a[:, None, :] + t[None, :, None] * (b - a)[:, None, :]).reshape(-1, 2)
        return BoundarySample(pts, level, self.unbounded)

    def to_dict(self):
        return {"variant": self.variant, "dim": 2, "vertices": [_vec(v) for v in self.vertices],
                "orientation": self.orientation}


@dataclass(frozen=True, eq=False)
class LatticeComplement(Domain):
    """R^n minus the points origin + k * spacing * direction, k in Z."""

    spacing: float = 1.0
    direction: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0]))
    origin: np.ndarray | None = None
    variant = "lattice_complement"

    def __post_init__(self):
        e = as_point(self.direction)
        L = float(np.linalg.norm(e))
        if L == 0:
            raise SpecError("field 'direction': zero vector")
        if not self.spacing > 0:
            raise SpecError("field 'spacing': must be positive")
        object.__setattr__(self, "direction", e / L)
        object.__setattr__(self, "spacing", float(self.spacing))
        o = np.zeros(e.size) if self.origin is None else as_point(self.origin, e.size)
        object.__setattr__(self, "origin", o)

    dim = property(lambda self: self.direction.size)
    unbounded = property(lambda self: True)
    degenerate = property(lambda self: True)

    def dist(self, pts):
        p = self._pts(pts) - self.origin
        k = np.rint(p @ self.direction / self.spacing)
        return np.linalg.norm(p - (k * self.spacing)[:, None] * self.direction, axis=1)

    def contains(self, pts):
        return self.dist(pts) > 0

    def _lattice_between(self, x, y):
        tx = (x - self.origin) @ self.direction / self.spacing
        ty = (y - self.origin) @ self.direction / self.spacing
        lo, hi = math.floor(min(tx, ty)) - 1, math.ceil(max(tx, ty)) + 1
        k = np.arange(lo, hi + 1)
        return self.origin + (k * self.spacing)[:, None] * self.direction

    def _segment_dist(self, x, y):
        return _closest_on_segment(self._lattice_between(x, y), x, y)

    def _first_exit(self, x, y):
        v = y - x
        ts = [float(np.clip((p - x) @ v / (v @ v), 0, 1)) for p in self._lattice_between(x, y)
              if point_segment_distance(p, x, y)[0] == 0]
        return min(ts) if ts else 1.0

    def sample_boundary(self, level):
        K = LATTICE_BASE * 2**level
        k = np.arange(-K, K + 1)
        return BoundarySample(self.origin + (k * self.spacing)[:, None] * self.direction, level, True)

    def to_dict(self):
        return {"variant": self.variant, "dim": self.dim, "spacing": self.spacing,
                "direction": _vec(self.direction), "origin": _vec(self.origin)}


@dataclass(frozen=True, eq=False)
class SampledBoundary(Domain):
    """Boundary known only through sample points plus a membership grid.

    ``inside`` is a boolean array over the cells of the box [lo, hi]; points
    outside the box are in the domain iff ``unbounded``. Distances are the
    nearest-sample distance minus the sample covering radius ``resolution``
    (default: half the largest nearest-neighbour gap), which keeps them below
    the distance to the boundary being sampled.
    """

    points: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    inside: np.ndarray
    unbounded_flag: bool = False
    resolution: float | None = None
    variant = "sampled"
    exact_distance = False

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] < 2 or len(pts) < 2:
            raise SpecError("field 'points': need at least two points of dimension >= 2")
        n = pts.shape[1]
        lo, hi = as_point(self.lo, n), as_point(self.hi, n)
        inside = np.asarray(self.inside, dtype=bool)
        if inside.ndim != n:
            raise SpecError(f"field 'inside': expected a {n}-dimensional boolean grid")
        if not np.all(hi > lo):
            raise SpecError("fields 'lo'/'hi': need lo < hi")
        tree = cKDTree(pts)
        res = self.resolution
        if res is None:
            dd, _ = tree.query(pts, k=2)
            res = 0.5 * float(dd[:, 1].max())
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "inside", inside)
        object.__setattr__(self, "resolution", float(res))
        object.__setattr__(self, "_tree", tree)

    dim = property(lambda self: self.points.shape[1])
    unbounded = property(lambda self: bool(self.unbounded_flag))

    @property
    def degenerate(self):
        c = self.points - self.points.mean(axis=0)
        sv = np.linalg.svd(c, compute_uv=False)
        if sv[-1] <= 1e-9 * sv[0]:
            return True
        # sphere test: |p|^2 = 2 c.p + k is linear in (c, k)
        A = np.column_stack([2 * self.points, np.ones(len(self.points))])
        b = np.einsum("ij,ij->i", self.points, self.points)
        sol, *_ = np.linalg.lstsq(A, b, rcond=None)
        return bool(np.max(np.abs(A @ sol - b)) <= 1e-9 * max(1.0, np.max(np.abs(b))))

    def dist(self, pts):
        d, _ = self._tree.query(self._pts(pts))
        return np.asarray(d, dtype=float) - self.resolution

    def contains(self, pts):
        p = self._pts(pts)
        shape = np.array(self.inside.shape)
        rel = (p - self.lo) / (self.hi - self.lo)
        in_box = np.all((rel >= 0) & (rel < 1), axis=1)
        idx = np.clip((rel * shape).astype(int), 0, shape - 1)
        out = np.full(len(p), self.unbounded)
        if in_box.any():
            out[in_box] = self.inside[tuple(idx[in_box].T)]
        return out

    def _segment_dist(self, x, y):
        t = np.linspace(0, 1, 257)
        if not np.all(self.contains(x + t[:, None] * (y - x))):
            return 0.0, 0.0
        d, t = _closest_on_segment(self.points, x, y)
        return d - self.resolution, t

    def bounding_box(self):
        return None if self.unbounded else (self.lo, self.hi)

    def sample_boundary(self, level):
        N = len(self.points)
        L = max(0, math.ceil(math.log2(max(N / CIRCLE_BASE, 1))))
        stride = 2 ** max(0, L - level)
        return BoundarySample(self.points[::stride].copy(), level, self.unbounded)

    def to_dict(self):
        return {"variant": self.variant, "dim": self.dim, "points": [_vec(p) for p in self.points],
                "lo": _vec(self.lo), "hi": _vec(self.hi),
                "inside": self.inside.astype(int).tolist(), "unbounded": self.unbounded,
                "resolution": self.resolution}


# ---------------------------------------------------------------------------
# module-level operations

def dist_to_boundary(G: Domain, x) -> float:
    return G.dist_to_boundary(x)


def sample_boundary(G: Domain, level: int) -> BoundarySample:
    if level < 0:
        raise ValueError("level must be >= 0")
    return G.sample_boundary(int(level))


def _req(d: dict, key: str):
    if key not in d:
        raise SpecError(f"field '{key}': missing for variant '{d.get('variant')}'")
    return d[key]


def _vector_field(d: dict, key: str, dim: int) -> np.ndarray:
    v = _req(d, key)
    try:
        arr = np.asarray(v, dtype=float).reshape(-1)
    except (TypeError, ValueError) as exc:
        raise SpecError(f"field '{key}': not a numeric vector") from exc
    if arr.size != dim:
        raise SpecError(f"field '{key}': has {arr.size} components, 'dim' is {dim}")
    return arr


def domain_from_dict(d: dict) -> Domain:
    """Build a domain from its key-value description."""
    if not isinstance(d, dict):
        raise SpecError("domain spec must be a mapping")
    variant = d.get("variant")
    if variant not in VARIANTS:
        raise SpecError(f"field 'variant': unknown variant {variant!r}; expected one of {', '.join(VARIANTS)}")
    try:
        dim = int(_req(d, "dim"))
    except (TypeError, ValueError) as exc:
        raise SpecError("field 'dim': not an integer") from exc
    if dim < 2:
        raise SpecError("field 'dim': must be >= 2")
    if variant == "half_space":
        return HalfSpace(_vector_field(d, "normal", dim), float(d.get("offset", 0.0)))
    if variant == "ball":
        return Ball(_vector_field(d, "center", dim), float(_req(d, "radius")))
    if variant == "punctured":
        return PuncturedSpace(_vector_field(d, "point", dim))
    if variant == "slab":
        if "axis" in d:
            axis = int(d["axis"])
            if not 0 <= axis < dim:
                raise SpecError(f"field 'axis': must be in [0, {dim})")
            return Slab.along_axis(dim, axis, float(_req(d, "low")), float(_req(d, "high")))
        return Slab(_vector_field(d, "normal", dim), float(_req(d, "low")), float(_req(d, "high")))
    if variant == "polygon2d":
        if dim != 2:
            raise SpecError("field 'dim': polygon2d requires dim 2")
        return Polygon2D(np.asarray(_req(d, "vertices"), dtype=float), d.get("orientation", "ccw"))
    if variant == "lattice_complement":
        origin = _vector_field(d, "origin", dim) if "origin" in d else None
        direction = _vector_field(d, "direction", dim) if "direction" in d else np.eye(dim)[0]
        return LatticeComplement(float(d.get("spacing", 1.0)), direction, origin)
    # sampled
    pts = np.asarray(_req(d, "points"), dtype=float)
    if pts.ndim != 2 or pts.shape[1] != dim:
        raise SpecError(f"field 'points': expected a list of {dim}-vectors")
    return SampledBoundary(pts, _vector_field(d, "lo", dim), _vector_field(d, "hi", dim),
                           np.asarray(_req(d, "inside"), dtype=bool), bool(d.get("unbounded", False)),
                           d.get("resolution"))
