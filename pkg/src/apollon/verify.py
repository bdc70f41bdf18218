"""Inequality suites over seeded fixture samples.

Each check reports the number of violations and the worst margin
(min over pairs of rhs - lhs; negative means a violation). Checks that only
hold in the limit of boundary refinement report the violation margin per
level instead and pass when it is nonincreasing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .domains import Ball, Domain, HalfSpace, PuncturedSpace
from .estimators import KBackend, a_uniformity_ratio, k_values
from .geometry import cross_ratio
from .maps import Inversion, estimate_rough_bilipschitz
from .metrics import apollonian, h_metric, j_metric, r_of_segment, r_ratio, seittenranta
from .sampling import PairSample, Window, interior_points, pair_sample

SUITES = ("sandwich", "lemma32", "segment", "mobius_invariance")
TOL = 1e-12
LOG3 = math.log(3.0)


@dataclass(frozen=True)
class Fixture:
    name: str
    domain: Domain
    window: tuple
    sample_domain: Domain | None = None  # law for pair sampling, if not the domain itself

    def pairs(self, count: int, seed: int) -> PairSample:
        return pair_sample(self.sample_domain or self.domain, self.window, count, seed)

    def local_pairs(self, count: int, seed: int, ratio: float = 0.5) -> PairSample:
        """x from the sampling law, y uniform in B(x, ratio * d(x)) with d of the fixture."""
        rng = np.random.default_rng(seed)
        x = interior_points(self.sample_domain or self.domain, self.window, count, rng)
        g = rng.standard_normal(x.shape)
        g /= np.linalg.norm(g, axis=1)[:, None]
        rad = ratio * self.domain.dist(x) * rng.random(count) ** (1.0 / x.shape[1])
        return PairSample(seed, Window.coerce(self.window), np.stack([x, x + rad[:, None] * g], axis=1),
                          law=f"local({ratio:g})")


def fixtures() -> list[Fixture]:
    return [
        Fixture("half_plane", HalfSpace([0.0, 1.0], 0.0), ([-5.0, 0.0], [5.0, 5.0])),
        Fixture("unit_disk", Ball([0.0, 0.0], 1.0), ([-0.9, -0.9], [0.9, 0.9]), Ball([0.0, 0.0], 0.9)),
        Fixture("punctured_plane", PuncturedSpace([0.0, 0.0]), ([-2.0, -2.0], [2.0, 2.0])),
    ]


@dataclass(frozen=True)
class CheckResult:
    suite: str
    check: str
    fixture: str
    count: int
    violations: int
    margin: float
    passed: bool
    detail: dict = field(default_factory=dict, compare=False)

    def row(self) -> dict:
        return {"suite": self.suite, "check": self.check, "fixture": self.fixture, "count": self.count,
                "violations": self.violations, "margin": self.margin, "passed": self.passed}


def _check(suite, check, fixture, lhs, rhs, tol=TOL, **detail) -> CheckResult:
    """lhs <= rhs elementwise, with a relative tolerance for rounding."""
    lhs, rhs = np.asarray(lhs, float), np.asarray(rhs, float)
    slack = rhs - lhs
    bad = slack < -tol * np.maximum(1.0, np.abs(rhs))
    margin = float(slack.min()) if slack.size else math.inf
    return CheckResult(suite, check, fixture, int(slack.size), int(bad.sum()), margin, not bad.any(), detail)


def _grid_backend(refine: bool = True) -> KBackend:
    return KBackend("auto", rel_h=0.125, refine=refine)


# ---------------------------------------------------------------------------

def h_sandwich(fx: Fixture, S: PairSample, cs=(2.0, 5.0, 10.0), suite="sandwich") -> list[CheckResult]:
    G = fx.domain
    j = np.array([j_metric(G, x, y).value for x, y in S.pairs])
    out = []
    for c in cs:
        h = np.array([h_metric(G, x, y, c).value for x, y in S.pairs])
        out.append(_check(suite, f"h_lower(c={c:g})", fx.name, c / (2 * (1 + c)) * j, h))
        out.append(_check(suite, f"h_upper(c={c:g})", fx.name, h, c * j))
    return out


def alpha_j_k_checks(fx: Fixture, S: PairSample, suite="lemma32", kback: KBackend | None = None) -> list[CheckResult]:
    G = fx.domain
    j = np.array([j_metric(G, x, y).value for x, y in S.pairs])
    a = np.array([apollonian(G, x, y).value for x, y in S.pairs])
    k, gap = k_values(G, S.pairs, kback or _grid_backend())
    return [
        _check(suite, "alpha/2<=j", fx.name, a / 2, j),
        _check(suite, "j<=alpha+log3", fx.name, j, a + LOG3),
        _check(suite, "j<=k+gap", fx.name, j, k + gap, max_gap=float(gap.max())),
    ]


def local_k_bounds(fx: Fixture, S: PairSample, suite="lemma32", kback: KBackend | None = None) -> list[CheckResult]:
    """For |x - y| <= d(x)/2: |x-y|/(2 d(x)) <= k <= 2|x-y|/d(x), within the grid gap."""
    G = fx.domain
    x, y = S.pairs[:, 0], S.pairs[:, 1]
    L = np.linalg.norm(x - y, axis=1)
    dx = G.dist(x)
    if np.any(L > dx / 2):
        raise ValueError("pairs violate the local hypothesis |x - y| <= d(x)/2")
    k, gap = k_values(G, S.pairs, kback or KBackend("grid", rel_h=0.125, refine=True))
    return [
        _check(suite, "local_lower", fx.name, L / (2 * dx), k + gap, max_gap=float(gap.max())),
        _check(suite, "local_upper", fx.name, k, 2 * L / dx + gap),
    ]


def punctured_no_a1(suite="lemma32") -> CheckResult:
    """R^2 minus a point admits no A_1: antipodal pairs have alpha = 0 < k."""
    G = PuncturedSpace([0.0, 0.0])
    S = PairSample(0, None, np.array([[[1.0, 0.0], [-1.0, 0.0]], [[0.0, 2.0], [0.0, -2.0]]]), law="fixed")
    fit = a_uniformity_ratio(G, S, KBackend("grid", h=0.02))
    n = len(fit.diagnostics["witnesses"])
    return CheckResult(suite, "no_A1_witness", "punctured_plane", len(S), 0 if n else 1, float(n), n > 0,
                       {"witnesses": fit.diagnostics["witnesses"]})


def rem_eq_exact(fx: Fixture, S: PairSample, suite="sandwich") -> list[CheckResult]:
    G = fx.domain
    j = np.array([j_metric(G, x, y).value for x, y in S.pairs])
    a = np.array([apollonian(G, x, y).value for x, y in S.pairs])
    d = np.array([seittenranta(G, x, y).value for x, y in S.pairs])
    return [
        _check(suite, "j<=delta", fx.name, j, d),
        _check(suite, "delta<=2j", fx.name, d, 2 * j),
        _check(suite, "alpha<=delta", fx.name, a, d),
        _check(suite, "delta<=log(e^alpha+2)", fx.name, d, np.log(np.exp(a) + 2)),
    ]


def rem_eq_refinement(fx: Fixture, S: PairSample, levels=range(4, 9), suite="sandwich") -> list[CheckResult]:
    """Sampled delta is a lower bound, so its upper inequalities must hold at
    every level while the lower ones may fail by a margin that must shrink
    (weakly) as the boundary sample refines."""
    G = fx.domain
    j = np.array([j_metric(G, x, y).value for x, y in S.pairs])
    a = np.array([apollonian(G, x, y).value for x, y in S.pairs])
    upper, viol = [], []
    for lv in levels:
        d = np.array([seittenranta(G, x, y, lv).value for x, y in S.pairs])
        upper.append(_check(suite, f"delta_sampled<=2j(level={lv})", fx.name, d, 2 * j))
        upper.append(_check(suite, f"delta_sampled<=log(e^alpha+2)(level={lv})", fx.name, d, np.log(np.exp(a) + 2)))
        viol.append(float(max(np.maximum(j - d, 0).max(), np.maximum(a - d, 0).max())))
    mono = all(b <= a_ + TOL for a_, b in zip(viol, viol[1:]))
    conv = CheckResult(suite, "rem_eq_lower_violation_nonincreasing", fx.name, len(S), 0 if mono else 1,
                       -max([b - a_ for a_, b in zip(viol, viol[1:])], default=0.0), mono,
                       {"levels": list(levels), "violation": viol})
    return upper + [conv]


def segment_checks(fx: Fixture, S: PairSample, suite="segment") -> list[CheckResult]:
    """Segment diameter bounds for pairs with r_G(x, y) <= 1/4, and the r_G(A) sandwich."""
    G = fx.domain
    r = np.array([r_ratio(G, x, y).value for x, y in S.pairs])
    sel = S.pairs[(r <= 0.25) & (r > 0)]
    if len(sel) == 0:
        return []
    rs = np.array([r_ratio(G, x, y).value for x, y in sel])
    est = [r_of_segment(G, x, y) for x, y in sel]
    rA = np.array([e.value for e in est])
    ratio = np.array([e.meta["diam"] / e.meta["dist_to_boundary"] for e in est])
    lo = np.array([e.meta["sandwich"][0] for e in est])
    return [
        _check(suite, "rA<=diam/dist", fx.name, rA, ratio),
        _check(suite, "diam/dist<=r/(1-r)", fx.name, ratio, rs / (1 - rs)),
        _check(suite, "diam/(2dist)<=rA", fx.name, lo, rA),
    ]


def mobius_checks(count: int = 10_000, seed: int = 0, suite="mobius_invariance") -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    u = Inversion(np.zeros(2))
    devs = []
    for _ in range(count):
        Q = rng.normal(size=(4, 2)) * rng.choice([0.1, 1.0, 10.0], size=(4, 1))
        t = cross_ratio(*Q)
        devs.append(abs(cross_ratio(*u.apply_many(Q)) / t - 1.0))
    devs = np.array(devs)
    out = [CheckResult(suite, "cross_ratio_inversion", "R2", count, int((devs > 1e-9).sum()),
                       float(1e-9 - devs.max()), bool(devs.max() <= 1e-9), {"max_rel_dev": float(devs.max())})]
    G = PuncturedSpace([0.0, 0.0])
    S = pair_sample(G, ([-2.0, -2.0], [2.0, 2.0]), 1000, seed)
    a = np.array([apollonian(G, x, y).value for x, y in S.pairs])
    img = S.mapped(u).pairs
    b = np.array([apollonian(G, x, y).value for x, y in img])
    dev = float(np.abs(a - b).max())
    out.append(CheckResult(suite, "alpha_inversion", "punctured_plane", len(S), int(dev > 1e-9), 1e-9 - dev,
                           dev <= 1e-9, {"max_abs_dev": dev}))
    fit = estimate_rough_bilipschitz(u, G, "alpha", S)
    dev = max(abs(fit["M"] - 1.0), abs(fit["C"]))
    out.append(CheckResult(suite, "rough_apollonian_inversion", "punctured_plane", len(S), int(dev > 1e-6),
                           1e-6 - dev, dev <= 1e-6, {"M": fit["M"], "C": fit["C"]}))
    return out


# ---------------------------------------------------------------------------

def run_suite(name: str, count: int = 1000, seed: int = 0, levels=range(4, 9)) -> list[CheckResult]:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; expected one of {', '.join(SUITES)}")
    out: list[CheckResult] = []
    if name == "mobius_invariance":
        return mobius_checks(10 * count, seed)
    for fx in fixtures():
        S = fx.pairs(count, seed)
        if name == "sandwich":
            out += h_sandwich(fx, S)
            out += alpha_j_k_checks(fx, S, suite="sandwich")
            if isinstance(fx.domain, PuncturedSpace):
                out += rem_eq_exact(fx, S)
            else:
                out += rem_eq_refinement(fx, S, levels)
        elif name == "lemma32":
            out += alpha_j_k_checks(fx, S)
            out += local_k_bounds(fx, fx.local_pairs(count // 2, seed))
        else:
            # local pairs with ratio 0.2 have r <= 1/4; uniform pairs add the far-from-boundary cases
            out += segment_checks(fx, fx.local_pairs(count, seed, ratio=0.2))
            out += segment_checks(fx, S)
    if name == "lemma32":
        out.append(punctured_no_a1())
    return out
