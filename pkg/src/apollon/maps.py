"""Closed-form maps (inversions, affine maps, radial powers and their
compositions), exact image domains for the supported (map, domain) pairs,
and distortion estimates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .domains import (Ball, Domain, HalfSpace, LatticeComplement, Polygon2D, PuncturedSpace, SampledBoundary,
                      Slab, SpecError)
from .estimators import ENVELOPE, LOWER_BOUND, KBackend, MetricFault, k_values, unit_directions, _check_radii, _trend
from .geometry import INF, DegenerateQuadruple, as_extended, as_point, cross_ratio, invert_many, mobius_inversion
from .metrics import METRICS
from .sampling import PairSample

MAP_VARIANTS = ("inversion", "affine", "radial_power", "composition", "identity")


class UnsupportedPair(ValueError):
    """The image of this domain under this map is not a supported variant."""


# ---------------------------------------------------------------------------
# map catalog

class MapSpec:
    variant = ""

    def __call__(self, x):
        return self.apply(x)

    def apply(self, x):
        raise NotImplementedError

    def apply_many(self, pts: np.ndarray) -> np.ndarray:
        """Vectorized evaluation on finite points with finite images."""
        return np.array([self.apply(p) for p in np.atleast_2d(pts)])

    def inverse(self) -> "MapSpec":
        raise NotImplementedError

    @property
    def is_mobius(self) -> bool:
        return False

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class Inversion(MapSpec):
    """x -> center + radius^2 (x - center) / |x - center|^2; swaps center and INF."""

    center: np.ndarray
    radius: float = 1.0
    variant = "inversion"

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        if not self.radius > 0:
            raise SpecError("field 'radius': must be positive")
        object.__setattr__(self, "radius", float(self.radius))

    def apply(self, x):
        return mobius_inversion(as_extended(x), self.center, self.radius)

    def apply_many(self, pts):
        pts = np.atleast_2d(np.asarray(pts, float))
        if np.any(np.all(pts == self.center, axis=1)):
            raise ValueError("the inversion center maps to INF")
        return invert_many(pts, self.center, self.radius)

    def inverse(self):
        return self

    is_mobius = property(lambda self: True)

    def to_dict(self):
        return {"variant": self.variant, "center": self.center.tolist(), "radius": self.radius}


@dataclass(frozen=True, eq=False)
class Affine(MapSpec):
    """x -> matrix @ x + offset with an invertible matrix; fixes INF."""

    matrix: np.ndarray
    offset: np.ndarray | None = None
    variant = "affine"

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.matrix, float))
        n = A.shape[0]
        if A.shape != (n, n) or n < 2:
            raise SpecError("field 'matrix': must be square of size >= 2")
        if not np.all(np.isfinite(A)) or np.linalg.cond(A) > 1e12:
            raise SpecError("field 'matrix': not invertible")
        b = np.zeros(n) if self.offset is None else as_point(self.offset, n)
        object.__setattr__(self, "matrix", A)
        object.__setattr__(self, "offset", b)

    @classmethod
    def identity(cls, dim: int) -> "Affine":
        return cls(np.eye(dim))

    @classmethod
    def similarity(cls, scale: float, angle: float = 0.0, offset=(0.0, 0.0)) -> "Affine":
        c, s = math.cos(angle), math.sin(angle)
        return cls(scale * np.array([[c, -s], [s, c]]), offset)

    dim = property(lambda self: self.matrix.shape[0])

    def apply(self, x):
        x = as_extended(x)
        if x is INF:
            return INF
        return self.matrix @ as_point(x, self.dim) + self.offset

    def apply_many(self, pts):
        return np.atleast_2d(np.asarray(pts, float)) @ self.matrix.T + self.offset

    def inverse(self):
        Ai = np.linalg.inv(self.matrix)
        return Affine(Ai, -Ai @ self.offset)

    def similarity_scale(self) -> float | None:
        """s if matrix = s * orthogonal, else None."""
        A = self.matrix
        s2 = float(np.trace(A.T @ A)) / self.dim
        if np.allclose(A.T @ A, s2 * np.eye(self.dim), rtol=0, atol=1e-12 * max(1.0, s2)):
            return math.sqrt(s2)
        return None

    is_mobius = property(lambda self: self.similarity_scale() is not None)

    def to_dict(self):
        return {"variant": self.variant, "matrix": self.matrix.tolist(), "offset": self.offset.tolist()}


@dataclass(frozen=True, eq=False)
class RadialPower(MapSpec):
    """x -> center + |x - center|^(K-1) (x - center); fixes center and INF.

    Quasiconformal with linear dilatation K (or 1/K) away from the center,
    and not Moebius unless K = 1.
    """

    exponent: float
    center: np.ndarray | None = None
    variant = "radial_power"

    def __post_init__(self):
        if not self.exponent > 0:
            raise SpecError("field 'exponent': must be positive")
        object.__setattr__(self, "exponent", float(self.exponent))
        if self.center is not None:
            object.__setattr__(self, "center", as_point(self.center))

    def _c(self, n: int) -> np.ndarray:
        return np.zeros(n) if self.center is None else self.center

    def apply(self, x):
        x = as_extended(x)
        if x is INF:
            return INF
        v = x - self._c(x.size)
        r = float(np.linalg.norm(v))
        if r == 0.0:
            return self._c(x.size).copy()
        return self._c(x.size) + r ** (self.exponent - 1.0) * v

    def apply_many(self, pts):
        pts = np.atleast_2d(np.asarray(pts, float))
        c = self._c(pts.shape[1])
        v = pts - c
        r = np.linalg.norm(v, axis=1)
        scale = np.where(r > 0, np.power(np.where(r > 0, r, 1.0), self.exponent - 1.0), 0.0)
        return c + scale[:, None] * v

    def inverse(self):
        return RadialPower(1.0 / self.exponent, self.center)

    is_mobius = property(lambda self: self.exponent == 1.0)

    def to_dict(self):
        return {"variant": self.variant, "exponent": self.exponent,
                "center": None if self.center is None else self.center.tolist()}


@dataclass(frozen=True, eq=False)
class Composition(MapSpec):
    """maps[0] is applied first."""

    maps: tuple
    variant = "composition"

    def __post_init__(self):
        if len(self.maps) == 0:
            raise SpecError("field 'maps': composition needs at least one map")
        object.__setattr__(self, "maps", tuple(self.maps))

    def apply(self, x):
        for f in self.maps:
            x = f.apply(x)
        return x

    def apply_many(self, pts):
        for f in self.maps:
            pts = f.apply_many(pts)
        return pts

    def inverse(self):
        return Composition(tuple(f.inverse() for f in reversed(self.maps)))

    is_mobius = property(lambda self: all(f.is_mobius for f in self.maps))

    def to_dict(self):
        return {"variant": self.variant, "maps": [f.to_dict() for f in self.maps]}


def apply_map(f: MapSpec, x):
    return f.apply(x)


def inverse(f: MapSpec) -> MapSpec:
    return f.inverse()


def map_from_dict(d: dict) -> MapSpec:
    if not isinstance(d, dict):
        raise SpecError("map spec must be a mapping")
    v = d.get("variant")
    if v not in MAP_VARIANTS:
        raise SpecError(f"field 'variant': unknown map variant {v!r}; expected one of {', '.join(MAP_VARIANTS)}")
    try:
        if v == "identity":
            return Affine.identity(int(d.get("dim", 2)))
        if v == "inversion":
            return Inversion(np.asarray(d["center"], float), float(d.get("radius", 1.0)))
        if v == "affine":
            return Affine(np.asarray(d["matrix"], float), d.get("offset"))
        if v == "radial_power":
            c = d.get("center")
            return RadialPower(float(d["exponent"]), None if c is None else np.asarray(c, float))
        maps = d["maps"]
    except KeyError as exc:
        raise SpecError(f"field '{exc.args[0]}': missing for map variant '{v}'") from None
    if not isinstance(maps, list):
        raise SpecError("field 'maps': expected a list of map specs")
    return Composition(tuple(map_from_dict(m) for m in maps))


# ---------------------------------------------------------------------------
# image domains

def _push_affine(f: Affine, G: Domain) -> Domain:
    A, b = f.matrix, f.offset
    if G.dim != f.dim:
        raise UnsupportedPair(f"map dimension {f.dim} does not match domain dimension {G.dim}")
    AiT = np.linalg.inv(A).T
    if isinstance(G, HalfSpace):
        n = AiT @ G.normal
        return HalfSpace(n, G.offset + n @ b)
    if isinstance(G, Slab):
        n = AiT @ G.normal
        return Slab(n, G.low + n @ b, G.high + n @ b)
    if isinstance(G, Ball):
        s = f.similarity_scale()
        if s is None:
            raise UnsupportedPair("the image of a ball under a non-similarity affine map is an ellipsoid")
        return Ball(A @ G.center + b, s * G.radius)
    if isinstance(G, PuncturedSpace):
        return PuncturedSpace(A @ G.point + b)
    if isinstance(G, Polygon2D):
        return Polygon2D(G.vertices @ A.T + b, G.orientation)
    if isinstance(G, LatticeComplement):
        e = A @ G.direction
        return LatticeComplement(G.spacing * float(np.linalg.norm(e)), e, A @ G.origin + b)
    if isinstance(G, SampledBoundary):
        return _push_sampled(f, G)
    raise UnsupportedPair(f"no affine image rule for variant '{G.variant}'")


def _push_sampled(f: Affine, G: SampledBoundary) -> SampledBoundary:
    """Map the samples and re-rasterize the membership grid on the image box
    (cell centres pulled back through the inverse map)."""
    corners = np.array(np.meshgrid(*zip(G.lo, G.hi), indexing="ij")).reshape(G.dim, -1).T
    img = f.apply_many(corners)
    lo, hi = img.min(axis=0), img.max(axis=0)
    shape = G.inside.shape
    axes = [lo[i] + (np.arange(shape[i]) + 0.5) * (hi[i] - lo[i]) / shape[i] for i in range(G.dim)]
    cells = np.array(np.meshgrid(*axes, indexing="ij")).reshape(G.dim, -1).T
    pre = f.inverse().apply_many(cells)
    inside = G.contains(pre).reshape(shape)
    s = f.similarity_scale()
    res = None if s is None else s * G.resolution
    return SampledBoundary(f.apply_many(G.points), lo, hi, inside, G.unbounded, res)


def _push_inversion(f: Inversion, G: Domain) -> Domain:
    c, rho2 = f.center, f.radius**2
    if G.dim != c.size:
        raise UnsupportedPair(f"map dimension {c.size} does not match domain dimension {G.dim}")
    if isinstance(G, PuncturedSpace):
        if np.array_equal(G.point, c):
            return PuncturedSpace(c.copy())
        raise UnsupportedPair("inverting a punctured space about another point removes two points; "
                              "the image is not a supported variant")
    if isinstance(G, HalfSpace):
        s = float(G.normal @ c) - G.offset  # signed height of the center
        if s == 0.0:
            return HalfSpace(G.normal.copy(), G.offset)
        if s > 0:
            raise UnsupportedPair("the inversion center lies in the half-space; the image is a ball exterior")
        r = rho2 / (2.0 * -s)
        return Ball(c + r * G.normal, r)
    if isinstance(G, Ball):
        v = G.center - c
        d2 = float(v @ v)
        R2 = G.radius**2
        if np.isclose(d2, R2, rtol=1e-12, atol=0):
            m = v / G.radius
            return HalfSpace(m, float(m @ c) + rho2 / (2.0 * G.radius))
        if d2 < R2:
            raise UnsupportedPair("the inversion center lies in the ball; the image is a ball exterior")
        return Ball(c + rho2 * v / (d2 - R2), rho2 * G.radius / (d2 - R2))
    raise UnsupportedPair(f"inversions map '{G.variant}' boundaries to curved sets outside the variant list")


def _push_radial(f: RadialPower, G: Domain) -> Domain:
    c = f._c(G.dim)
    K = f.exponent
    if isinstance(G, PuncturedSpace) and np.array_equal(G.point, c):
        return PuncturedSpace(c.copy())
    if isinstance(G, Ball) and np.array_equal(G.center, c):
        return Ball(c.copy(), G.radius**K)
    if isinstance(G, HalfSpace) and float(G.normal @ c) == G.offset:
        return HalfSpace(G.normal.copy(), G.offset)  # cones at the center are invariant
    raise UnsupportedPair("radial powers are supported on punctured spaces, balls and half-spaces "
                          "centred at the map's center")


def push_domain(f: MapSpec, G: Domain) -> Domain:
    """Exact image f(G) for supported pairs; raises UnsupportedPair otherwise."""
    if isinstance(f, Composition):
        for g in f.maps:
            G = push_domain(g, G)
        return G
    if isinstance(f, Affine):
        return _push_affine(f, G)
    if isinstance(f, Inversion):
        return _push_inversion(f, G)
    if isinstance(f, RadialPower):
        return _push_radial(f, G)
    raise UnsupportedPair(f"unknown map {f!r}")


# ---------------------------------------------------------------------------
# distortion estimates

@dataclass(frozen=True)
class DistortionFit:
    kind: str  # rough_bilipschitz | qm_theta | dilatation
    values: dict
    certificate: str = LOWER_BOUND
    manifest: dict = field(default_factory=dict)
    table: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]


def rough_bilipschitz_constants(m: np.ndarray, mp: np.ndarray) -> tuple[float, float, int]:
    """Smallest (M, C), M >= 1, C >= 0, with mp <= M m + C and m <= M mp + C
    on every pair, minimizing C first.

    C is forced only by pairs where exactly one of m, mp vanishes; then M is
    the largest remaining ratio. Returns (M, C, index of a tight pair).
    """
    m, mp = np.asarray(m, float), np.asarray(mp, float)
    z1, z2 = (m == 0) & (mp > 0), (mp == 0) & (m > 0)
    C = float(max(mp[z1].max(initial=0.0), m[z2].max(initial=0.0)))
    with np.errstate(divide="ignore", invalid="ignore"):
        up = np.where(m > 0, (mp - C) / m, -np.inf)
        dn = np.where(mp > 0, (m - C) / mp, -np.inf)
    ratio = np.maximum(up, dn)
    if ratio.size == 0:
        return 1.0, C, -1
    i = int(np.argmax(ratio))
    M = max(1.0, float(ratio[i]))
    if C > 0 and M == 1.0:
        i = int(np.argmax(np.where(z1, mp, 0.0) + np.where(z2, m, 0.0)))
    return M, C, i


def _metric_values(G: Domain, pairs: np.ndarray, metric: str, level: int, kback: KBackend, c: float):
    if metric == "k":
        return k_values(G, pairs, kback)[0]
    fn = METRICS[metric]
    out = np.empty(len(pairs))
    for i, (x, y) in enumerate(pairs):
        try:
            out[i] = fn(G, x, y, level=level, c=c).value
        except Exception as exc:
            raise MetricFault(i, x, y, exc) from exc
    return out


def estimate_rough_bilipschitz(f: MapSpec, G: Domain, metric: str, S: PairSample, level: int = 6,
                               kback: KBackend = KBackend(), c: float = 2.0) -> DistortionFit:
    """Lexicographically minimal (C first, then M) roughly bilipschitz
    constants of f: (G, m_G) -> (f(G), m_f(G)) over the sampled pairs."""
    if metric not in ("alpha", "j", "delta", "h", "k"):
        raise ValueError(f"unknown metric {metric!r}")
    Gp = push_domain(f, G)
    keep = np.array([not np.array_equal(x, y) for x, y in S.pairs], dtype=bool)
    pairs = S.pairs[keep]
    img = S.mapped(f).pairs[keep]
    m = _metric_values(G, pairs, metric, level, kback, c)
    mp = _metric_values(Gp, img, metric, level, kback, c)
    M, C, i = rough_bilipschitz_constants(m, mp)
    return DistortionFit("rough_bilipschitz", {"metric": metric, "M": M, "C": C},
                         manifest={"map": f.to_dict(), "domain": G.to_dict(), "image": Gp.to_dict(),
                                   "sample": S.manifest(), "metric": metric, "level": level,
                                   "objective": "lexicographic: C then M", **kback.describe(G)},
                         diagnostics={"tight_pair": pairs[i].tolist() if i >= 0 else None,
                                      "pairs_used": int(keep.sum()),
                                      "max_abs_diff": float(np.abs(mp - m).max(initial=0.0))})


def _tau(Q) -> float | None:
    try:
        t = cross_ratio(*Q)
    except DegenerateQuadruple:
        return None
    return t if 0.0 < t < math.inf else None


def fit_power_envelope(t, tp, T, Theta, lam_max: float = 10.0) -> tuple[float, float]:
    """(C, lambda) of theta(t) = C max(t^lambda, t^(1/lambda)) dominating every
    sampled (t, tp), lambda in [1, lam_max], C >= 1.

    For fixed lambda the smallest dominating log C is a max of residuals;
    lambda minimizes the squared log-log misfit to the envelope points
    (T, Theta).
    """
    lt, ltp, lT, lTh = np.log(t), np.log(tp), np.log(T), np.log(Theta)

    def g(lam, x):
        return np.maximum(lam * x, x / lam)

    def logc(lam):
        return max(0.0, float((ltp - g(lam, lt)).max()))

    def misfit(lam):
        return float(np.sum((lTh - logc(lam) - g(lam, lT)) ** 2))

    grid = np.linspace(1.0, lam_max, 901)
    vals = np.array([misfit(lam) for lam in grid])
    k = int(np.argmin(vals))
    lam = float(grid[k])
    res = minimize_scalar(misfit, bounds=(grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]),
                          method="bounded", options={"xatol": 1e-10})
    if res.fun < vals[k]:
        lam = float(res.x)
    return math.exp(logc(lam)), lam


def estimate_qm_theta(f: MapSpec, quads, bins: int = 16, fit: bool = True, lam_max: float = 10.0) -> DistortionFit:
    """Monotone envelope of tau(fQ) against tau(Q).

    Bins are log-spaced over the sampled tau(Q). For each bin b, T_b is the
    running max of tau(Q) and Theta_b the running max of tau(fQ) over bins
    up to b, so theta(T_b) >= Theta_b for any valid control function.
    Quadruples with repeated points, or whose cross ratio is 0 or INF before
    or after the map, are skipped and counted.
    """
    t, tp, skipped = [], [], 0
    for Q in quads:
        a = _tau(Q)
        b = _tau(tuple(f.apply(p) for p in Q)) if a is not None else None
        if a is None or b is None:
            skipped += 1
            continue
        t.append(a)
        tp.append(b)
    t, tp = np.array(t), np.array(tp)
    if t.size == 0:
        raise ValueError("no usable quadruple")
    edges = np.geomspace(t.min(), t.max(), bins + 1)
    b = np.clip(np.searchsorted(edges, t, side="right") - 1, 0, bins - 1)
    tmax, thmax = np.zeros(bins), np.zeros(bins)
    np.maximum.at(tmax, b, t)
    np.maximum.at(thmax, b, tp)
    counts = np.bincount(b, minlength=bins)
    T, Theta = np.maximum.accumulate(tmax), np.maximum.accumulate(thmax)
    table = [{"t_lo": float(edges[i]), "t_hi": float(edges[i + 1]), "count": int(counts[i]),
              "T": float(T[i]), "theta": float(Theta[i])} for i in range(bins)]
    values = {}
    if fit:
        ok = counts > 0
        C, lam = fit_power_envelope(t, tp, T[ok], Theta[ok], lam_max)
        values = {"C": C, "lambda": lam}
    return DistortionFit("qm_theta", values, certificate=ENVELOPE,
                         manifest={"map": f.to_dict(), "bins": bins, "count": len(t) + skipped},
                         table=table, diagnostics={"skipped": skipped, "evaluated": int(t.size)})


def linear_dilatation(f: MapSpec, G: Domain, x, radii, m: int = 16) -> DistortionFit:
    """Per radius, max / min of |f(x) - f(x + r e)| over m directions."""
    if m < 16:
        raise ValueError("linear_dilatation needs m >= 16 directions")
    x = G.check_interior(x)
    radii = _check_radii(G, x, radii)
    E = unit_directions(G.dim, m)
    fx = np.asarray(f.apply(x), float)
    table = []
    for r in radii:
        d = np.linalg.norm(f.apply_many(x + r * E) - fx, axis=1)
        table.append({"r": float(r), "max": float(d.max()), "min": float(d.min()),
                      "ratio": float(d.max() / d.min())})
    ratios = [row["ratio"] for row in table]
    return DistortionFit("dilatation", {"H": ratios[-1], "trend": _trend(ratios)}, certificate=ENVELOPE,
                         manifest={"map": f.to_dict(), "domain": G.to_dict(), "x": x.tolist(),
                                   "radii": radii.tolist(), "directions": m},
                         table=table)
