"""Sample-based estimates of structural constants: uniformity (c, d), the
phi-envelope, the A-uniformity ratio, four-point Gromov delta, quasi-isotropy
and a naturality report.

Every fit is a max or a minimal feasible constant over a finite sample, so it
certifies only a lower bound on the true optimal constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .domains import Domain
from .metrics import EXACT_ALPHA, apollonian, j_metric, r_ratio
from .parallel import pmap
from .qh import (GridError, NotConnected, build_grid, has_exact_k, qh_distance, qh_distances_from,
                 qh_exact_values, window_around)
from .sampling import PairSample, QuadrupleSample

LOWER_BOUND = "lower_bound_on_true_constant"
ENVELOPE = "empirical_envelope"


class NumericalFault(RuntimeError):
    """An estimate contradicts a proven inequality beyond numerical noise."""


class MetricFault(RuntimeError):
    """A metric evaluation failed; carries the offending pair."""

    def __init__(self, index: int, x, y, cause: Exception):
        super().__init__(f"pair {index} ({np.round(x, 6).tolist()}, {np.round(y, 6).tolist()}): "
                         f"{type(cause).__name__}: {cause}")
        self.index, self.x, self.y, self.cause = index, x, y, cause


@dataclass(frozen=True)
class ConstantFit:
    kind: str
    values: dict
    certificate: str = LOWER_BOUND
    manifest: dict = field(default_factory=dict)
    table: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]


# ---------------------------------------------------------------------------
# k backends

@dataclass(frozen=True)
class KBackend:
    """How estimators evaluate k_G.

    ``auto`` uses the closed form when the domain has one and the grid
    otherwise. Grid resolution is ``h`` if given, else ``rel_h * min(d(x), d(y))``
    per pair.
    """

    kind: str = "auto"  # auto | exact | grid
    rel_h: float = 0.125
    h: float | None = None
    refine: bool = False
    stencil: int | None = None

    def __post_init__(self):
        if self.kind not in ("auto", "exact", "grid"):
            raise ValueError(f"unknown k backend {self.kind!r}")

    def uses_exact(self, G: Domain) -> bool:
        if self.kind == "exact" and not has_exact_k(G):
            raise ValueError(f"no closed form for k on variant '{G.variant}'")
        return self.kind == "exact" or (self.kind == "auto" and has_exact_k(G))

    def describe(self, G: Domain) -> dict:
        if self.uses_exact(G):
            return {"k": "exact"}
        out = {"k": "grid", "refine": self.refine, "stencil": self.stencil}
        out.update({"h": self.h} if self.h is not None else {"rel_h": self.rel_h})
        return out


def k_values(G: Domain, pairs: np.ndarray, backend: KBackend = KBackend()) -> tuple[np.ndarray, np.ndarray]:
    """(values, gaps) of k over an array of pairs (m, 2, n)."""
    pairs = np.asarray(pairs, float)
    if backend.uses_exact(G):
        return qh_exact_values(G, pairs[:, 0], pairs[:, 1]), np.zeros(len(pairs))

    def one(item):
        i, (x, y) = item
        h = backend.h if backend.h is not None else backend.rel_h * float(G.dist(np.vstack([x, y])).min())
        try:
            e = qh_distance(G, x, y, h, stencil=backend.stencil, refine=backend.refine)
        except Exception as exc:
            raise MetricFault(i, x, y, exc) from exc
        return e.value, e.gap

    res = pmap(one, list(enumerate(pairs)))
    return np.array([r[0] for r in res]), np.array([r[1] for r in res])


def _j_values(G: Domain, pairs) -> np.ndarray:
    return np.array([j_metric(G, x, y).value for x, y in pairs])


def _manifest(G: Domain, S, **extra) -> dict:
    return {"domain": G.to_dict(), "spec_hash": G.spec_hash(), "sample": S.manifest(), **extra}


# ---------------------------------------------------------------------------
# uniformity and envelopes

def fit_uniformity(G: Domain, S: PairSample, kback: KBackend = KBackend()) -> ConstantFit:
    """Smallest (c, d) with k <= c j + d on every sampled pair.

    The additive constant is minimized first; since j = 0 forces x = y and so
    k = 0, it is always 0, and c = max k / j. The maximizing pair is tight.
    """
    if len(S) < 1:
        raise ValueError("need at least one pair")
    k, gap = k_values(G, S.pairs, kback)
    j = _j_values(G, S.pairs)
    zero = j == 0
    if np.any(zero & (k > 0)):
        i = int(np.flatnonzero(zero & (k > 0))[0])
        raise NumericalFault(f"pair {i} has j = 0 but k = {k[i]:.6g} > 0")
    pos = ~zero
    ratio = np.where(pos, k / np.where(pos, j, 1.0), 0.0)
    i = int(np.argmax(ratio))
    c = float(ratio[i])
    return ConstantFit("uniformity", {"c": c, "d": 0.0},
                       manifest=_manifest(G, S, **kback.describe(G)),
                       diagnostics={"argmax": i, "pair": S.pairs[i].tolist(), "k": float(k[i]),
                                    "j": float(j[i]), "max_gap": float(gap.max()), "pairs_used": int(pos.sum())})


def _bin_index(values: np.ndarray, edges: np.ndarray) -> np.ndarray:
    return np.clip(np.searchsorted(edges, values, side="right") - 1, 0, len(edges) - 2)


def phi_envelope(G: Domain, S: PairSample, bins: int = 16, kback: KBackend = KBackend(),
                 edges=None) -> ConstantFit:
    """Step function phi(r): bin-wise max of k over pairs with r_G in the bin,
    then a running max. Bins are log-spaced over the sampled r unless
    ``edges`` is given. Bins before the first data point hold 0."""
    if bins < 4 and edges is None:
        raise ValueError("phi_envelope needs bins >= 4")
    r = np.array([r_ratio(G, x, y).value for x, y in S.pairs])
    k, gap = k_values(G, S.pairs, kback)
    keep = r > 0
    r, k, gap = r[keep], k[keep], gap[keep]
    if edges is None:
        if r.size == 0:
            raise ValueError("no pair with x != y")
        edges = np.geomspace(r.min(), r.max(), bins + 1)
    edges = np.asarray(edges, float)
    b = _bin_index(r, edges)
    nb = len(edges) - 1
    bin_max = np.full(nb, -np.inf)
    bin_gap = np.zeros(nb)
    np.maximum.at(bin_max, b, k)
    np.maximum.at(bin_gap, b, gap)
    counts = np.bincount(b, minlength=nb)
    phi = np.maximum.accumulate(np.maximum(bin_max, 0.0))
    gap_env = np.maximum.accumulate(bin_gap)
    table = [{"r_lo": float(edges[i]), "r_hi": float(edges[i + 1]), "count": int(counts[i]),
              "k_max": float(bin_max[i]) if counts[i] else float("nan"), "phi": float(phi[i]),
              "gap": float(gap_env[i])} for i in range(nb)]
    return ConstantFit("phi_envelope", {"edges": edges.tolist(), "phi": phi.tolist()}, certificate=ENVELOPE,
                       manifest=_manifest(G, S, bins=nb, **kback.describe(G)), table=table)


def a_uniformity_ratio(G: Domain, S: PairSample, kback: KBackend = KBackend(), level: int = 6) -> ConstantFit:
    """sup k / alpha over pairs; pairs with alpha = 0 < k are reported as
    witnesses that no finite A_1 exists."""
    if not isinstance(G, EXACT_ALPHA) and level < 6:
        raise ValueError("sampled alpha needs level >= 6")
    keep = np.array([not np.array_equal(x, y) for x, y in S.pairs], dtype=bool)
    pairs = S.pairs[keep]
    k, gap = k_values(G, pairs, kback) if len(pairs) else (np.empty(0), np.empty(0))
    a = np.array([apollonian(G, x, y, level).value for x, y in pairs])
    wit = (a == 0) & (k > 0)
    finite = a > 0
    ratio = float((k[finite] / a[finite]).max()) if finite.any() else 0.0
    witnesses = [{"pair": pairs[i].tolist(), "k": float(k[i]), "alpha": 0.0} for i in np.flatnonzero(wit)]
    return ConstantFit("a_ratio", {"sup": ratio, "unbounded": bool(witnesses)},
                       manifest=_manifest(G, S, level=level, **kback.describe(G)),
                       diagnostics={"witnesses": witnesses, "excluded_equal_pairs": int((~keep).sum()),
                                    "max_gap": float(gap.max()) if gap.size else 0.0})


# ---------------------------------------------------------------------------
# Gromov four-point delta

def four_point_delta(d: np.ndarray) -> np.ndarray:
    """Largest four-point defect of each quadruple, over all relabelings.

    ``d`` has columns (xy, xz, xw, yz, yw, zw). With S1 >= S2 >= S3 the three
    pair sums d(x,y)+d(z,w), d(x,z)+d(y,w), d(x,w)+d(y,z), the max over
    orderings of min((x.y)_w, (y.z)_w) - (x.z)_w equals (S1 - S2) / 2.
    """
    d = np.atleast_2d(d)
    s = np.sort(np.column_stack([d[:, 0] + d[:, 5], d[:, 1] + d[:, 4], d[:, 2] + d[:, 3]]), axis=1)
    return 0.5 * (s[:, 2] - s[:, 1])


def gromov_product(dxy: float, dxw: float, dyw: float) -> float:
    """(x.y)_w = (d(x,w) + d(y,w) - d(x,y)) / 2."""
    return 0.5 * (dxw + dyw - dxy)


_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def _pool_distances(G: Domain, pts: np.ndarray, used: np.ndarray, h: float, window, stencil):
    grid = build_grid(G, window, h, stencil)
    P = len(pts)
    D = np.full((P, P), np.inf)
    np.fill_diagonal(D, 0.0)
    bad = np.zeros(P, dtype=bool)

    def row(i):
        try:
            return qh_distances_from(grid, pts[i], pts)
        except GridError:
            return None

    rows = pmap(row, list(used))
    for i, r in zip(used, rows):
        if r is None:
            bad[i] = True
        else:
            D[i] = r
    # rows exist only for searched points; either direction serves a pair
    return np.minimum(D, D.T), bad, grid.meta


def gromov_delta_4pt(G: Domain, Q: QuadrupleSample, kback: KBackend = KBackend(), window=None) -> ConstantFit:
    """delta_hat = max over sampled quadruples of the four-point defect.

    Exact k is evaluated per quadruple. The grid backend builds one grid over
    ``window`` (default: hull of the pool, inflated) at resolution ``kback.h``
    and runs one full search per pool point. Quadruples touching a point that
    cannot be snapped or connected are skipped and counted.
    """
    quads = Q.quads()
    m = len(quads)
    meta = {}
    if kback.uses_exact(G):
        X = np.concatenate([quads[:, a] for a, _ in _PAIRS])
        Y = np.concatenate([quads[:, b] for _, b in _PAIRS])
        d = qh_exact_values(G, X, Y).reshape(6, m).T
        ok = np.ones(m, dtype=bool)
    else:
        if kback.h is None:
            raise ValueError("grid Gromov estimate needs a fixed resolution h")
        used = np.unique(Q.index[:, :3])  # rows for x, y, z cover all six pairs
        win = window_around(G, Q.points) if window is None else window
        D, bad, meta = _pool_distances(G, Q.points, used, kback.h, win, kback.stencil)
        d = np.column_stack([D[Q.index[:, a], Q.index[:, b]] for a, b in _PAIRS])
        ok = np.all(np.isfinite(d), axis=1) & ~np.any(bad[Q.index], axis=1)
    delta = np.full(m, -np.inf)
    if ok.any():
        delta[ok] = four_point_delta(d[ok])
    i = int(np.argmax(delta)) if ok.any() else -1
    value = max(0.0, float(delta[i])) if i >= 0 else 0.0
    return ConstantFit("gromov_delta", {"delta": value},
                       manifest={"domain": G.to_dict(), "spec_hash": G.spec_hash(), "sample": Q.manifest(),
                                 **kback.describe(G), "grid": meta},
                       diagnostics={"argmax": i, "quadruple": quads[i].tolist() if i >= 0 else None,
                                    "evaluated": int(ok.sum()), "skipped": int((~ok).sum())})


# ---------------------------------------------------------------------------
# quasi-isotropy and naturality

def unit_directions(dim: int, m: int) -> np.ndarray:
    """m unit vectors: equally spaced on the circle, or a Fibonacci set on S^2."""
    if dim == 2:
        t = 2.0 * np.pi * np.arange(m) / m
        return np.column_stack([np.cos(t), np.sin(t)])
    if dim == 3:
        i = np.arange(m) + 0.5
        z = 1.0 - 2.0 * i / m
        phi = np.pi * (1.0 + 5**0.5) * i
        s = np.sqrt(1.0 - z * z)
        return np.column_stack([s * np.cos(phi), s * np.sin(phi), z])
    raise ValueError(f"directions are implemented for dimensions 2 and 3, got {dim}")


def _trend(values) -> str:
    d = np.diff(np.asarray(values, float))
    if d.size == 0:
        return "single"
    if np.all(d <= 0):
        return "nonincreasing"
    if np.all(d >= 0):
        return "nondecreasing"
    return "mixed"


def _check_radii(G: Domain, x, radii) -> np.ndarray:
    radii = np.asarray(radii, float)
    dx = G.dist_to_boundary(x)
    if radii.size == 0 or np.any(radii <= 0) or np.any(radii >= dx / 2):
        raise ValueError(f"radii must lie in (0, d_G(x)/2) = (0, {dx / 2:.6g})")
    if np.any(np.diff(radii) >= 0):
        raise ValueError("radii must be strictly decreasing")
    return radii


def quasi_isotropy(G: Domain, x, radii, m: int = 32, level: int = 6) -> ConstantFit:
    """Per radius r, max / min of alpha(x, x + r e) over m directions e.

    L_hat is the ratio at the smallest radius; the trend over the (decreasing)
    radii is reported, not extrapolated.
    """
    if m < 8:
        raise ValueError("quasi_isotropy needs m >= 8 directions")
    if not isinstance(G, EXACT_ALPHA) and level < 6:
        raise ValueError("sampled alpha needs level >= 6")
    x = G.check_interior(x)
    radii = _check_radii(G, x, radii)
    E = unit_directions(G.dim, m)
    table = []
    for r in radii:
        a = np.array([apollonian(G, x, x + r * e, level).value for e in E])
        lo, hi = float(a.min()), float(a.max())
        ratio = hi / lo if lo > 0 else math.inf
        table.append({"r": float(r), "max": hi, "min": lo, "ratio": ratio})
    ratios = [row["ratio"] for row in table]
    return ConstantFit("isotropy", {"L": ratios[-1], "trend": _trend(ratios)}, certificate=ENVELOPE,
                       manifest={"domain": G.to_dict(), "x": x.tolist(), "radii": radii.tolist(),
                                 "directions": m, "level": level},
                       table=table)


def polyline_points(A, per_edge: int = 4) -> np.ndarray:
    """Vertices of A plus ``per_edge - 1`` equally spaced points inside each edge."""
    A = np.atleast_2d(np.asarray(A, float))
    if len(A) == 1:
        return A.copy()
    t = np.arange(per_edge) / per_edge
    body = (A[:-1, None, :] + t[None, :, None] * (A[1:] - A[:-1])[:, None, :]).reshape(-1, A.shape[1])
    return np.vstack([body, A[-1:]])


def natural_check(G: Domain, A, h: float | None = None, per_edge: int = 4, window=None,
                  stencil: int | None = None) -> ConstantFit:
    """Report (r_G(A), k_G(A)) for a polyline A, both as maxima over pairs of
    points sampled along A. No pass/fail: the naturality function is not
    explicit."""
    A = np.atleast_2d(np.asarray(A, float))
    for p in A:
        G.check_interior(p)
    for a, b in zip(A[:-1], A[1:]):
        G.segment_closest(a, b)  # raises SegmentExitsDomain
    pts = polyline_points(A, per_edge)
    n = len(pts)
    if n == 1:
        return ConstantFit("natural", {"r": 0.0, "k": 0.0}, certificate="report",
                           manifest={"domain": G.to_dict(), "polyline": A.tolist()})
    d = G.dist(pts)
    diff = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
    r = float((diff / np.minimum(d[:, None], d[None, :])).max())
    if has_exact_k(G) and h is None:
        iu = np.triu_indices(n, 1)
        k = float(qh_exact_values(G, pts[iu[0]], pts[iu[1]]).max())
        kinfo = {"k": "exact"}
    else:
        h = 0.125 * float(d.min()) if h is None else h
        win = window_around(G, pts) if window is None else window
        grid = build_grid(G, win, h, stencil)
        rows = pmap(lambda i: qh_distances_from(grid, pts[i], pts[i + 1:]), range(n - 1))
        k = float(max(row.max() for row in rows))
        if not math.isfinite(k):
            raise NotConnected(h)
        kinfo = {"k": "grid", "h": h, "grid": grid.meta}
    return ConstantFit("natural", {"r": r, "k": k}, certificate="report",
                       manifest={"domain": G.to_dict(), "polyline": A.tolist(), "per_edge": per_edge, **kinfo})
