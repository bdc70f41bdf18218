"""Configured experiments shared by the scripts and the acceptance tests.

Each experiment is a dataclass config plus a ``run`` function returning a
plain dict of measured values, so a run is reproducible from its config.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass

from .domains import HalfSpace, LatticeComplement, PuncturedSpace, domain_from_dict
from .estimators import KBackend, fit_uniformity, gromov_delta_4pt
from .maps import RadialPower, estimate_qm_theta, estimate_rough_bilipschitz, map_from_dict, push_domain
from .sampling import closure_quadruples, pair_sample, quadruple_sample


@dataclass(frozen=True)
class GromovContrastConfig:
    seed: int = 7
    half_count: int = 10_000
    half_window: tuple = ((-10.0, 0.0), (10.0, 10.0))
    lattice_seed: int = 1
    widths: tuple = (5.0, 20.0, 80.0)
    pool: int = 40
    h: float = 0.25
    grid_factor: float = 1.5  # grid window half-width relative to the sampling window
    d_min: float = 0.5  # inner band of the stratified pool, in lattice spacings


def run_gromov_contrast(cfg: GromovContrastConfig = GromovContrastConfig()) -> dict:
    t0 = time.perf_counter()
    H = HalfSpace([0.0, 1.0], 0.0)
    half = [gromov_delta_4pt(H, quadruple_sample(H, cfg.half_window, n, cfg.seed))["delta"]
            for n in (cfg.half_count, 2 * cfg.half_count)]
    t1 = time.perf_counter()
    L = LatticeComplement(1.0)
    lattice = []
    for W in cfg.widths:
        Q = quadruple_sample(L, ([-W, -W], [W, W]), None, cfg.lattice_seed, pool=cfg.pool, law="stratified",
                             d_min=cfg.d_min)
        R = cfg.grid_factor * W
        fit = gromov_delta_4pt(L, Q, KBackend("grid", h=cfg.h), window=([-R, -R], [R, R]))
        lattice.append(fit["delta"])
    t2 = time.perf_counter()
    return {"config": asdict(cfg), "half_plane": half, "half_change": abs(half[1] - half[0]) / half[0],
            "lattice": lattice, "seconds": {"half_plane": t1 - t0, "lattice": t2 - t1}}


@dataclass(frozen=True)
class ChainCase:
    name: str
    domain: dict
    map: dict
    window: tuple
    image_h: float | None = None  # grid step for k on the image; None when k has a closed form


CHAIN_CASES = (
    ChainCase("inversion_half_space", {"variant": "half_space", "dim": 2, "normal": [0.0, 1.0], "offset": 1.0},
              {"variant": "inversion", "center": [0.0, 0.0]}, ((-1.0, 1.25), (1.0, 3.0)), image_h=0.004),
    ChainCase("inversion_punctured", {"variant": "punctured", "dim": 2, "point": [0.0, 0.0]},
              {"variant": "inversion", "center": [0.0, 0.0]}, ((-2.0, -2.0), (2.0, 2.0))),
)


@dataclass(frozen=True)
class UniformityChainConfig:
    count: int = 1000
    seed: int = 0
    cases: tuple = CHAIN_CASES


def run_uniformity_chain(cfg: UniformityChainConfig = UniformityChainConfig()) -> list[dict]:
    """Uniformity fit on a source sample S in G and on f(S) in f(G)."""
    out = []
    for case in cfg.cases:
        t0 = time.perf_counter()
        G, f = domain_from_dict(case.domain), map_from_dict(case.map)
        Gp = push_domain(f, G)
        S = pair_sample(G, case.window, cfg.count, cfg.seed)
        src = fit_uniformity(G, S)
        kb = KBackend("grid", h=case.image_h) if case.image_h else KBackend("auto")
        img = fit_uniformity(Gp, S.mapped(f), kb)
        out.append({"case": case.name, "image": Gp.to_dict(), "c_source": src["c"], "c_image": img["c"],
                    "ratio": img["c"] / src["c"], "max_gap": img.diagnostics["max_gap"],
                    "seconds": time.perf_counter() - t0})
    return out


@dataclass(frozen=True)
class PowerQMConfig:
    exponent: float = 2.0
    count: int = 20_000
    pairs: int = 2000
    seed: int = 3
    window: tuple = ((-2.0, -2.0), (2.0, 2.0))
    bins: int = 16
    slack: float = 0.1


def run_power_qm(cfg: PowerQMConfig = PowerQMConfig()) -> dict:
    """Measure theta for a radial power on the punctured plane, fit the power
    envelope, then fit rough-Apollonian constants on the same domain."""
    G = PuncturedSpace([0.0, 0.0])
    f = RadialPower(cfg.exponent)
    quads = closure_quadruples(G, cfg.window, cfg.count, cfg.seed)
    theta = estimate_qm_theta(f, quads, cfg.bins)
    rough = estimate_rough_bilipschitz(f, G, "alpha", pair_sample(G, cfg.window, cfg.pairs, cfg.seed))
    C_fit, lam = theta["C"], theta["lambda"]
    return {"config": asdict(cfg), "lambda_fit": lam, "C_fit": C_fit, "M": rough["M"], "C": rough["C"],
            "table": theta.table, "M_ok": rough["M"] <= lam + cfg.slack,
            "C_ok": rough["C"] <= math.log(C_fit) + cfg.slack}
