"""Seeded point, pair and quadruple samples.

Points are drawn uniformly in a window and rejection-filtered against the
domain. Candidates are generated in fixed-size chunks from one generator, so
a sample of size 2N starts with the sample of size N (prefix nesting); this
is what makes "doubling the sample never decreases a max-type estimate" an
exact statement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .domains import Domain

CHUNK = 1024
MAX_DRAWS = 10_000_000


@dataclass(frozen=True)
class Window:
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo, hi = np.asarray(self.lo, float), np.asarray(self.hi, float)
        if lo.shape != hi.shape or not np.all(hi > lo):
            raise ValueError("window needs lo < hi componentwise")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def coerce(cls, w) -> "Window":
        return w if isinstance(w, cls) else cls(*w)

    def to_list(self) -> list:
        return [self.lo.tolist(), self.hi.tolist()]


def interior_points(G: Domain, window, count: int, rng: np.random.Generator, margin: float = 0.0) -> np.ndarray:
    """``count`` points uniform in window and G with d_G > margin."""
    w = Window.coerce(window)
    out, have, draws = [], 0, 0
    while have < count:
        cand = w.lo + (w.hi - w.lo) * rng.random((CHUNK, w.lo.size))
        draws += CHUNK
        keep = G.contains(cand)
        keep[keep] &= G.dist(cand[keep]) > margin
        out.append(cand[keep])
        have += int(keep.sum())
        if draws > MAX_DRAWS and have < count:
            raise ValueError("window barely meets the domain; rejection sampling stalled")
    return np.vstack(out)[:count] if out else np.empty((0, w.lo.size))


def stratified_points(G: Domain, window, count: int, rng: np.random.Generator, d_min: float) -> np.ndarray:
    """``count`` points of G in ``window`` with equally many in each dyadic
    band d_G in [d_min 2^i, d_min 2^(i+1)), up to the largest d_G on the window.

    Uniform points put almost no mass near the boundary of a large window;
    this law gives every scale the same weight. Within a band points are
    uniform (rejection from the same chunked stream).
    """
    w = Window.coerce(window)
    probe = np.array(np.meshgrid(*[np.linspace(a, b, 65) for a, b in zip(w.lo, w.hi)], indexing="ij"))
    probe = probe.reshape(w.lo.size, -1).T
    probe = probe[G.contains(probe)]
    if probe.size == 0:
        raise ValueError("window does not meet the domain")
    bands = max(1, int(np.floor(np.log2(G.dist(probe).max() / d_min))))
    quota = np.full(bands, count // bands)
    quota[bands - count % bands:] += 1  # remainder to the outer bands
    got = [[] for _ in range(bands)]
    draws = 0
    while any(len(g) < q for g, q in zip(got, quota)):
        cand = w.lo + (w.hi - w.lo) * rng.random((CHUNK, w.lo.size))
        draws += CHUNK
        cand = cand[G.contains(cand)]
        b = np.floor(np.log2(G.dist(cand) / d_min)).astype(int)
        for p, i in zip(cand, b):
            if 0 <= i < bands and len(got[i]) < quota[i]:
                got[i].append(p)
        if draws > MAX_DRAWS:
            raise ValueError("a distance band is too thin for rejection sampling")
    return np.vstack([np.array(g) for g in got if g])


@dataclass(frozen=True)
class PairSample:
    seed: int
    window: Window | None  # None for explicit pair lists
    pairs: np.ndarray  # (m, 2, n)
    law: str = "uniform"
    meta: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_pairs(cls, pairs) -> "PairSample":
        return cls(0, None, np.asarray(pairs, float), law="explicit")

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def mapped(self, f) -> "PairSample":
        img = f.apply_many(self.pairs.reshape(-1, self.pairs.shape[-1])).reshape(self.pairs.shape)
        return PairSample(self.seed, self.window, img, f"image({self.law})",
                          dict(self.meta, map=f.to_dict()))

    def manifest(self) -> dict:
        return {"seed": int(self.seed), "count": len(self),
                "window": None if self.window is None else self.window.to_list(), "law": self.law, **self.meta}


def pair_sample(G: Domain, window, count: int, seed: int) -> PairSample:
    """Pairs of independent uniform points of G in ``window``."""
    w = Window.coerce(window)
    rng = np.random.default_rng(seed)
    pts = interior_points(G, w, 2 * count, rng)
    return PairSample(int(seed), w, pts.reshape(count, 2, -1))


def local_pair_sample(G: Domain, window, count: int, seed: int, ratio: float = 0.5) -> PairSample:
    """Pairs with |x - y| <= ratio * d_G(x): x uniform, y uniform in the ball
    B(x, ratio * d_G(x))."""
    w = Window.coerce(window)
    rng = np.random.default_rng(seed)
    x = interior_points(G, w, count, rng)
    n = w.lo.size
    g = rng.standard_normal((count, n))
    g /= np.linalg.norm(g, axis=1)[:, None]
    rad = ratio * G.dist(x) * rng.random(count) ** (1.0 / n)
    y = x + rad[:, None] * g
    return PairSample(int(seed), w, np.stack([x, y], axis=1), law=f"local({ratio:g})")


@dataclass(frozen=True)
class QuadrupleSample:
    """Quadruples as index rows into a point pool."""

    seed: int
    window: Window
    points: np.ndarray  # (P, n)
    index: np.ndarray  # (m, 4)
    meta: dict = field(default_factory=dict, compare=False)

    def __len__(self):
        return len(self.index)

    def quads(self) -> np.ndarray:
        return self.points[self.index]

    def manifest(self) -> dict:
        return {"seed": int(self.seed), "count": len(self), "pool": len(self.points),
                "window": self.window.to_list(), **self.meta}


def quadruple_sample(G: Domain, window, count: int | None, seed: int, pool: int | None = None,
                     law: str = "uniform", d_min: float | None = None) -> QuadrupleSample:
    """``count`` quadruples of interior points.

    Without ``pool`` each quadruple has four fresh points. With ``pool`` the
    quadruples are seeded random 4-subsets of a fixed pool of that many
    points, or all 4-subsets when ``count`` is None. ``law="stratified"``
    draws the pool with ``stratified_points`` (requires ``d_min``).
    """
    w = Window.coerce(window)
    if law not in ("uniform", "stratified"):
        raise ValueError(f"unknown law {law!r}")
    if law == "stratified" and (pool is None or d_min is None):
        raise ValueError("the stratified law needs a pool and d_min")
    if pool is None:
        if count is None:
            raise ValueError("count is required without a pool")
        pts = interior_points(G, w, 4 * count, np.random.default_rng(seed))
        return QuadrupleSample(int(seed), w, pts, np.arange(4 * count).reshape(count, 4))
    if pool < 4:
        raise ValueError("pool needs at least 4 points")
    rng = np.random.default_rng(seed)
    if law == "stratified":
        pts = stratified_points(G, w, pool, rng, d_min)
    else:
        pts = interior_points(G, w, pool, rng)
    meta = {"law": law} if law == "uniform" else {"law": law, "d_min": d_min}
    if count is None:
        idx = np.array(list(combinations(range(pool), 4)), dtype=np.int64)
        return QuadrupleSample(int(seed), w, pts, idx, meta={**meta, "subsets": "all"})
    irng = np.random.default_rng([seed, 1])
    idx = np.empty((count, 4), np.int64)
    for i in range(count):
        idx[i] = irng.choice(pool, 4, replace=False)
    return QuadrupleSample(int(seed), w, pts, idx, meta={**meta, "subsets": "random"})


def closure_quadruples(G: Domain, window, count: int, seed: int, level: int = 2,
                       p_boundary: float = 0.3) -> list:
    """Quadruples of extended points from G and its boundary (including INF
    for unbounded domains); each entry is a boundary point with probability
    ``p_boundary``. Boundary points come from ``G.sample_boundary(level)``."""
    w = Window.coerce(window)
    rng = np.random.default_rng(seed)
    bnd = G.sample_boundary(level).as_list()
    inner = interior_points(G, w, 4 * count, rng)
    coin = rng.random(4 * count) < p_boundary
    pick = rng.integers(0, len(bnd), 4 * count)
    pts = [bnd[pick[i]] if coin[i] else inner[i] for i in range(4 * count)]
    return [tuple(pts[4 * i:4 * i + 4]) for i in range(count)]
