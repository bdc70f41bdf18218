"""Quasihyperbolic distance k_G on weighted lattice graphs, plus the closed
forms for half-spaces and punctured spaces.

Nodes live on h * Z^n inside a window and keep a margin d_G > h. The grid
value is neither an upper nor a lower bound of k_G; every estimate carries
the change under one refinement h -> h/2 as its gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from ._kernel import lattice_dijkstra
from .domains import Domain, DomainError, HalfSpace, PuncturedSpace
from .geometry import as_point
from .metrics import MetricEstimate

# Stencil radius per dimension: all primitive integer offsets with max-norm
# <= radius (radius 1 is the 8/26-neighbour stencil).
DEFAULT_STENCIL = {2: 4, 3: 2}
SNAP_RADIUS = 2.0  # in units of h


class GridError(DomainError):
    """The window holds no usable node near a query point."""


class NotConnected(RuntimeError):
    """The query points lie in different grid components at this resolution."""

    def __init__(self, h, x=None, y=None):
        where = "" if x is None else f" between {np.round(x, 6).tolist()} and {np.round(y, 6).tolist()}"
        super().__init__(f"not connected at resolution h={h:g}{where}")
        self.h = h


def stencil_offsets(dim: int, radius: int) -> np.ndarray:
    offs = []
    for v in product(range(-radius, radius + 1), repeat=dim):
        if any(v) and math.gcd(*[abs(c) for c in v]) == 1:
            offs.append(v)
    return np.array(sorted(offs), dtype=np.int64)


@dataclass(frozen=True, eq=False)
class QhGrid:
    domain: Domain
    h: float
    window: tuple  # (lo, hi) arrays
    origin: np.ndarray  # integer lattice index of node 0
    shape: np.ndarray
    dist: np.ndarray  # d_G at nodes, flattened (C order)
    valid: np.ndarray
    offsets: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def node_count(self) -> int:
        return int(self.valid.sum())

    def coords(self, idx) -> np.ndarray:
        multi = np.array(np.unravel_index(np.asarray(idx), tuple(self.shape))).T
        return (multi + self.origin) * self.h

    def on_window_edge(self, idx) -> bool:
        multi = np.array(np.unravel_index(np.asarray(idx), tuple(self.shape))).T
        return bool(np.any((multi == 0) | (multi == self.shape - 1)))

    def snap(self, p: np.ndarray, dp: float):
        """Valid nodes within SNAP_RADIUS * h of p and their trapezoid weights."""
        r = SNAP_RADIUS * self.h
        lo = np.maximum(np.ceil((p - r) / self.h).astype(np.int64) - self.origin, 0)
        hi = np.minimum(np.floor((p + r) / self.h).astype(np.int64) - self.origin, self.shape - 1)
        if np.any(hi < lo):
            return np.empty(0, np.int64), np.empty(0)
        axes = [np.arange(a, b + 1) for a, b in zip(lo, hi)]
        multi = np.array(np.meshgrid(*axes, indexing="ij")).reshape(len(axes), -1)
        idx = np.ravel_multi_index(multi, tuple(self.shape))
        pts = (multi.T + self.origin) * self.h
        L = np.linalg.norm(pts - p, axis=1)
        d = self.dist[idx]
        keep = self.valid[idx] & (L <= r) & (d + dp > L)
        idx, L, d = idx[keep], L[keep], d[keep]
        return idx, 0.5 * L * (1.0 / dp + 1.0 / d)

    def search(self, src_nodes, src_w, tgt_w=None, stop_early=False):
        if tgt_w is None:
            tgt_w = np.full(self.dist.size, np.inf)
        return lattice_dijkstra(self.shape.astype(np.int64), self.dist, self.valid, self.h, self.offsets,
                                np.asarray(src_nodes, np.int64), np.asarray(src_w, float), tgt_w, stop_early)


def _clip(G: Domain, lo, hi) -> tuple:
    box = G.bounding_box()
    if box is None:
        return lo, hi
    return np.maximum(lo, box[0]), np.minimum(hi, box[1])


def default_window(G: Domain, x, y) -> tuple:
    """Box hull of x, y inflated by max(d(x), d(y), |x - y|), clipped to the
    domain's bounding box."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    pad = max(float(G.dist(x)[0]), float(G.dist(y)[0]), float(np.linalg.norm(x - y)))
    return _clip(G, np.minimum(x, y) - pad, np.maximum(x, y) + pad)


def window_around(G: Domain, pts) -> tuple:
    pts = np.atleast_2d(np.asarray(pts, float))
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    pad = max(float(G.dist(pts).max()), float(np.linalg.norm(hi - lo)))
    return _clip(G, lo - pad, hi + pad)


def build_grid(G: Domain, window, h: float, stencil: int | None = None) -> QhGrid:
    """Lattice nodes h * Z^n inside ``window`` with d_G > h."""
    if not h > 0:
        raise ValueError("resolution h must be positive")
    if G.dim not in (2, 3):
        raise ValueError(f"grids support dimensions 2 and 3, got {G.dim}")
    lo, hi = (np.asarray(w, float) for w in window)
    ilo = np.ceil(lo / h).astype(np.int64)
    ihi = np.floor(hi / h).astype(np.int64)
    shape = ihi - ilo + 1
    if np.any(shape <= 0):
        raise GridError("window does not meet domain at this resolution")
    axes = [(np.arange(a, b + 1) * h) for a, b in zip(ilo, ihi)]
    pts = np.array(np.meshgrid(*axes, indexing="ij")).reshape(G.dim, -1).T
    d = G.dist(pts)
    valid = G.contains(pts) & (d > h)
    if not valid.any():
        raise GridError("window does not meet domain at this resolution")
    radius = DEFAULT_STENCIL[G.dim] if stencil is None else int(stencil)
    meta = {"h": h, "window": [lo.tolist(), hi.tolist()], "shape": shape.tolist(),
            "nodes": int(valid.sum()), "stencil": radius}
    return QhGrid(G, float(h), (lo, hi), ilo, shape, np.ascontiguousarray(d, float), valid,
                  stencil_offsets(G.dim, radius), meta)


@dataclass(frozen=True)
class QhPath:
    points: np.ndarray  # x, grid nodes..., y
    cumulative: np.ndarray  # cumulative weight at each point
    snap: tuple  # (snap weight at x, snap weight at y)
    weight: float
    touches_window: bool = False

    @property
    def nodes(self) -> np.ndarray:
        return self.points[1:-1]


def _endpoints(grid: QhGrid, x, y):
    G = grid.domain
    dx, dy = float(G.dist(x)[0]), float(G.dist(y)[0])
    sx, wx = grid.snap(x, dx)
    sy, wy = grid.snap(y, dy)
    if sx.size == 0 or sy.size == 0:
        bad = x if sx.size == 0 else y
        raise GridError(f"no grid node within {SNAP_RADIUS:g}h of {np.round(bad, 6).tolist()} at h={grid.h:g}")
    return dx, dy, sx, wx, sy, wy


def _grid_solve(grid: QhGrid, x, y, want_path=False):
    dx, dy, sx, wx, sy, wy = _endpoints(grid, x, y)
    tgt = np.full(grid.dist.size, np.inf)
    np.minimum.at(tgt, sy, wy)
    dist, pred = grid.search(sx, wx, tgt, stop_early=True)
    tot = dist[sy] + wy
    i = int(np.argmin(tot))
    best = float(tot[i])
    L = float(np.linalg.norm(x - y))
    direct = 0.5 * L * (1 / dx + 1 / dy) if (L <= SNAP_RADIUS * grid.h and dx + dy > L) else math.inf
    if direct <= best:
        path = QhPath(np.vstack([x, y]), np.array([0.0, direct]), (direct, 0.0), direct)
        return direct, path if want_path else None
    if not math.isfinite(best):
        raise NotConnected(grid.h, x, y)
    if not want_path:
        return best, None
    node = int(sy[i])
    seq = [node]
    while pred[node] >= 0:
        node = int(pred[node])
        seq.append(node)
    seq.reverse()
    j = int(np.flatnonzero(sx == seq[0])[0])
    snap_x = float(wx[j])
    cum = np.concatenate([[0.0], dist[seq], [best]])
    pts = np.vstack([x, grid.coords(seq), y])
    path = QhPath(pts, cum, (snap_x, float(wy[i])), best, grid.on_window_edge(seq))
    return best, path


def qh_geodesic(G: Domain, x, y, h: float, window=None, stencil: int | None = None) -> QhPath:
    """Grid geodesic from x to y; its weight equals ``qh_distance(...).value``."""
    x, y = G.check_interior(x), G.check_interior(y)
    if np.array_equal(x, y):
        return QhPath(x[None, :].copy(), np.zeros(1), (0.0, 0.0), 0.0)
    window = default_window(G, x, y) if window is None else window
    grid = build_grid(G, window, h, stencil)
    return _grid_solve(grid, x, y, want_path=True)[1]


def qh_distance(G: Domain, x, y, h: float, window=None, stencil: int | None = None,
                refine: bool = True) -> MetricEstimate:
    """Grid estimate of k_G(x, y) at resolution h.

    ``refine`` repeats the search at h/2 and reports the change as the gap.
    """
    x, y = G.check_interior(x), G.check_interior(y)
    if np.array_equal(x, y):
        return MetricEstimate(0.0, method="grid", resolution=h)
    window = default_window(G, x, y) if window is None else window
    grid = build_grid(G, window, h, stencil)
    value, _ = _grid_solve(grid, x, y)
    meta = dict(grid.meta)
    gap = 0.0
    if refine:
        fine, _ = _grid_solve(build_grid(G, window, h / 2, stencil), x, y)
        gap = abs(fine - value)
        meta["refined_value"] = fine
    return MetricEstimate(value, method="grid", resolution=h, gap=gap, meta=meta,
                          flags=() if G.exact_distance else ("approximate",))


def qh_distances_from(grid: QhGrid, source, targets) -> np.ndarray:
    """Grid k from one point to many (single full search)."""
    G = grid.domain
    source = np.asarray(source, float)
    ds = float(G.dist(source)[0])
    sx, wx = grid.snap(source, ds)
    if sx.size == 0:
        raise GridError(f"no grid node near {np.round(source, 6).tolist()} at h={grid.h:g}")
    dist, _ = grid.search(sx, wx)
    out = np.empty(len(targets))
    for i, t in enumerate(np.atleast_2d(targets)):
        if np.array_equal(t, source):
            out[i] = 0.0
            continue
        dt = float(G.dist(t)[0])
        st, wt = grid.snap(t, dt)
        out[i] = float((dist[st] + wt).min()) if st.size else math.inf
        L = float(np.linalg.norm(t - source))
        if L <= SNAP_RADIUS * grid.h and ds + dt > L:
            out[i] = min(out[i], 0.5 * L * (1 / ds + 1 / dt))
    return out


# ---------------------------------------------------------------------------
# closed forms

def qh_exact_value(G: Domain, x: np.ndarray, y: np.ndarray) -> float:
    if isinstance(G, HalfSpace):
        hx, hy = G.height(np.vstack([x, y]))
        return 2.0 * math.asinh(float(np.linalg.norm(x - y)) / (2.0 * math.sqrt(hx * hy)))
    if isinstance(G, PuncturedSpace):
        u, v = x - G.point, y - G.point
        nu, nv = float(np.linalg.norm(u)), float(np.linalg.norm(v))
        c = float(np.clip(u @ v / (nu * nv), -1.0, 1.0))
        theta = math.atan2(math.sqrt(max(0.0, 1.0 - c * c)), c)
        return math.hypot(theta, math.log(nu / nv))
    raise ValueError(f"no closed form for k on variant '{G.variant}'")


def qh_exact_values(G: Domain, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Vectorized closed-form k for rows of X and Y."""
    X, Y = np.atleast_2d(X), np.atleast_2d(Y)
    if isinstance(G, HalfSpace):
        hx, hy = G.height(X), G.height(Y)
        return 2.0 * np.arcsinh(np.linalg.norm(X - Y, axis=1) / (2.0 * np.sqrt(hx * hy)))
    if isinstance(G, PuncturedSpace):
        U, V = X - G.point, Y - G.point
        nu, nv = np.linalg.norm(U, axis=1), np.linalg.norm(V, axis=1)
        cross = np.sqrt(np.maximum(nu**2 * nv**2 - np.einsum("ij,ij->i", U, V) ** 2, 0.0))
        theta = np.arctan2(cross, np.einsum("ij,ij->i", U, V))
        return np.hypot(theta, np.log(nu / nv))
    raise ValueError(f"no closed form for k on variant '{G.variant}'")


def qh_distance_exact(G: Domain, x, y) -> MetricEstimate:
    """Closed-form k_G for half-spaces (hyperbolic metric) and punctured spaces
    (sqrt(theta^2 + log^2(|x|/|y|)) with theta the angle at the puncture)."""
    if not isinstance(G, (HalfSpace, PuncturedSpace)):
        raise ValueError(f"no closed form for k on variant '{G.variant}'")
    x, y = G.check_interior(x), G.check_interior(y)
    return MetricEstimate(qh_exact_value(G, x, y))


def has_exact_k(G: Domain) -> bool:
    return isinstance(G, (HalfSpace, PuncturedSpace))
