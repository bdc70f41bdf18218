"""Command-line front end.

    apollon metric j --spec half.yaml --pair 0,1 0,2.718281828
    apollon estimate gromov --spec half.yaml --count 10000 --seed 7 --window=-5,0:5,5
    apollon verify sandwich
    apollon geodesic --spec punct.yaml --pair 1,0 -1,0 --resolution 0.02

Exit codes: 0 success, 1 numerical fault, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

import numpy as np

from .domains import Domain, DomainError, SpecError, domain_from_dict
from .estimators import (KBackend, MetricFault, NumericalFault, a_uniformity_ratio, fit_uniformity,
                         gromov_delta_4pt, natural_check, phi_envelope, quasi_isotropy)
from .io import RunManifest, digest, load_spec, write_outputs
from .maps import (UnsupportedPair, estimate_qm_theta, estimate_rough_bilipschitz, linear_dilatation,
                   map_from_dict)
from .metrics import apollonian, h_metric, j_metric, r_ratio, seittenranta
from .qh import GridError, NotConnected, qh_distance, qh_distance_exact, has_exact_k, qh_geodesic
from .sampling import closure_quadruples, pair_sample, quadruple_sample
from .verify import SUITES, run_suite

METRIC_NAMES = ("alpha", "j", "k", "delta", "h", "r")
ESTIMATORS = ("uniformity", "phi", "a_ratio", "gromov", "isotropy", "rough_bilip", "qm_theta",
              "dilatation", "natural")
FAULTS = (NumericalFault, MetricFault, NotConnected, GridError, DomainError, UnsupportedPair,
          FloatingPointError)


NEGATIVE_VECTOR = re.compile(r"^-\d[\d.eE+,;:-]*$|^-\.\d[\d.eE+,;:-]*$")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument parsing

def _vector(text: str) -> np.ndarray:
    try:
        return np.array([float(t) for t in text.split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated vector: {text!r}") from None


def _window(text: str):
    lo, sep, hi = text.partition(":")
    if not sep:
        raise argparse.ArgumentTypeError("window must look like lo1,lo2:hi1,hi2")
    return _vector(lo).tolist(), _vector(hi).tolist()


def _floats(text: str) -> list:
    return _vector(text).tolist()


def _polyline(text: str) -> list:
    return [_vector(p).tolist() for p in text.split(";")]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", help="domain spec (YAML or JSON)")
    common.add_argument("--map", help="map spec (YAML or JSON)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--count", type=int, help="number of sampled pairs or quadruples")
    common.add_argument("--window", type=_window, help="sampling window lo1,lo2:hi1,hi2")
    common.add_argument("--resolution", type=float, help="grid step h for k (default: closed form or d/8)")
    common.add_argument("--level", type=int, help="boundary sampling level (forces sampled alpha)")
    common.add_argument("--bins", type=int, default=16)
    common.add_argument("--out", help="output CSV path (default: stdout, no manifest)")

    p = argparse.ArgumentParser(prog="apollon", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("metric", parents=[common], help="evaluate a metric on pairs")
    m.add_argument("name", choices=METRIC_NAMES)
    m.add_argument("--pair", nargs=2, type=_vector, action="append", metavar=("X", "Y"))
    m.add_argument("-c", type=float, default=2.0, help="parameter of h_{G,c}")

    e = sub.add_parser("estimate", parents=[common], help="run an estimator")
    e.add_argument("name", choices=ESTIMATORS)
    e.add_argument("--metric", default="alpha", choices=("alpha", "j", "delta", "h", "k"),
                   help="metric for rough_bilip")
    e.add_argument("--point", type=_vector, help="base point for isotropy/dilatation")
    e.add_argument("--radii", type=_floats, help="strictly decreasing radii, comma-separated")
    e.add_argument("--directions", type=int, default=32)
    e.add_argument("--polyline", type=_polyline, help="x1,y1;x2,y2;... for natural")
    e.add_argument("--pool", type=int, help="gromov: draw quadruples from a pool of this many points")

    v = sub.add_parser("verify", parents=[common], help="run an inequality suite")
    v.add_argument("suite", help=f"one of {', '.join(SUITES)}")

    g = sub.add_parser("geodesic", parents=[common], help="grid geodesic between two points")
    g.add_argument("--pair", nargs=2, type=_vector, action="append", metavar=("X", "Y"))

    r = sub.add_parser("replay", help="re-run a manifest")
    r.add_argument("manifest")
    r.add_argument("--out")
    # let vectors such as -1,0 pass as values rather than options
    for q in (p, m, e, v, g, r):
        q._negative_number_matcher = NEGATIVE_VECTOR
    return p


# ---------------------------------------------------------------------------

def _domain(args, man: RunManifest) -> Domain:
    if not args.spec:
        raise UsageError("--spec is required")
    d = load_spec(args.spec)
    G = domain_from_dict(d)
    man.add_spec("domain", d)
    return G


def _map(args, man: RunManifest):
    if not args.map:
        raise UsageError("--map is required for this estimator")
    d = load_spec(args.map)
    f = map_from_dict(d)
    man.add_spec("map", d)
    return f


def _window_for(G: Domain, args):
    if args.window is not None:
        return args.window
    box = G.bounding_box()
    if box is None:
        raise UsageError(f"--window is required for the unbounded variant '{G.variant}'")
    return [np.asarray(box[0]).tolist(), np.asarray(box[1]).tolist()]


def _kback(args) -> KBackend:
    return KBackend("grid", h=args.resolution) if args.resolution else KBackend("auto")


def _count(args, default=None) -> int:
    n = args.count if args.count is not None else default
    if n is None or n < 1:
        raise UsageError("--count must be a positive integer")
    return n


def _pairs(G: Domain, args, man: RunManifest) -> np.ndarray:
    if args.pair:
        if args.count is not None:
            raise UsageError("use either --pair or --count, not both")
        pairs = np.array([[x, y] for x, y in args.pair])
        if pairs.shape[-1] != G.dim:
            raise UsageError(f"pair coordinates must have {G.dim} components")
        return pairs
    S = pair_sample(G, _window_for(G, args), _count(args), args.seed)
    man.seeds.append(args.seed)
    man.counts.append(len(S))
    return S.pairs


def _metric_one(G: Domain, name: str, x, y, args):
    if name == "j":
        return j_metric(G, x, y)
    if name == "r":
        return r_ratio(G, x, y)
    if name == "h":
        return h_metric(G, x, y, args.c)
    if name == "alpha":
        return apollonian(G, x, y, args.level if args.level is not None else 6, sampled=args.level is not None)
    if name == "delta":
        return seittenranta(G, x, y, args.level if args.level is not None else 6)
    if args.resolution is None and has_exact_k(G):
        return qh_distance_exact(G, x, y)
    h = args.resolution if args.resolution else 0.125 * float(G.dist(np.vstack([x, y])).min())
    return qh_distance(G, x, y, h)


def cmd_metric(args, man: RunManifest) -> dict:
    G = _domain(args, man)
    pairs = _pairs(G, args, man)
    man.levels.append(args.level)
    man.resolutions.append(args.resolution)
    rows = []
    for i, (x, y) in enumerate(pairs):
        try:
            e = _metric_one(G, args.name, x, y, args)
        except FAULTS as exc:
            raise MetricFault(i, x, y, exc) from exc
        rows.append({"metric": args.name, "x": x, "y": y, "value": e.value, "method": e.method_label,
                     "bound": e.bound_label, "level": e.level})
    return {"metric": (["metric", "x", "y", "value", "method", "bound", "level"], rows)}


def _fit_tables(fit, name: str) -> dict:
    rows = [{"estimator": name, "quantity": k, "value": v} for k, v in fit.values.items()]
    rows.append({"estimator": name, "quantity": "certificate", "value": fit.certificate})
    for k, v in sorted(fit.diagnostics.items()):
        if isinstance(v, (int, float, str, np.integer, np.floating)):
            rows.append({"estimator": name, "quantity": f"diag.{k}", "value": v})
    out = {"report": (["estimator", "quantity", "value"], rows)}
    if fit.table:
        out["table"] = (list(fit.table[0].keys()), fit.table)
    return out


def cmd_estimate(args, man: RunManifest) -> dict:
    G = _domain(args, man)
    name = args.name
    kb = _kback(args)
    man.resolutions.append(args.resolution)
    level = args.level if args.level is not None else 6
    man.levels.append(level)

    def pairs():
        S = pair_sample(G, _window_for(G, args), _count(args, 1000), args.seed)
        man.seeds.append(args.seed)
        man.counts.append(len(S))
        return S

    if name == "uniformity":
        fit = fit_uniformity(G, pairs(), kb)
    elif name == "phi":
        fit = phi_envelope(G, pairs(), args.bins, kb)
    elif name == "a_ratio":
        fit = a_uniformity_ratio(G, pairs(), kb, level)
    elif name == "gromov":
        if not kb.uses_exact(G) and kb.h is None:
            raise UsageError("gromov on a domain without closed-form k needs --resolution")
        count = args.count if args.pool else _count(args, 10_000)  # pool without count: all 4-subsets
        Q = quadruple_sample(G, _window_for(G, args), count, args.seed, pool=args.pool)
        man.seeds.append(args.seed)
        man.counts.append(len(Q))
        fit = gromov_delta_4pt(G, Q, kb)
    elif name in ("isotropy", "dilatation"):
        if args.point is None or args.radii is None:
            raise UsageError(f"{name} needs --point and --radii")
        if name == "isotropy":
            fit = quasi_isotropy(G, args.point, args.radii, args.directions, level)
        else:
            fit = linear_dilatation(_map(args, man), G, args.point, args.radii, args.directions)
    elif name == "rough_bilip":
        f = _map(args, man)
        fit = estimate_rough_bilipschitz(f, G, args.metric, pairs(), level, kb)
    elif name == "qm_theta":
        f = _map(args, man)
        n = _count(args, 10_000)
        quads = closure_quadruples(G, _window_for(G, args), n, args.seed, level=min(level, 4))
        man.seeds.append(args.seed)
        man.counts.append(n)
        fit = estimate_qm_theta(f, quads, args.bins)
    else:  # natural
        if args.polyline is None:
            raise UsageError("natural needs --polyline")
        fit = natural_check(G, args.polyline, args.resolution)
    return _fit_tables(fit, name)


def cmd_verify(args, man: RunManifest) -> tuple[dict, bool]:
    if args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; expected one of {', '.join(SUITES)}")
    n = _count(args, 1000)
    man.seeds.append(args.seed)
    man.counts.append(n)
    res = run_suite(args.suite, n, args.seed)
    header = ["suite", "check", "fixture", "count", "violations", "margin", "passed"]
    return {"verify": (header, [r.row() for r in res])}, all(r.passed for r in res)


def cmd_geodesic(args, man: RunManifest) -> dict:
    G = _domain(args, man)
    if not args.pair or len(args.pair) != 1:
        raise UsageError("geodesic needs exactly one --pair X Y")
    x, y = args.pair[0]
    h = args.resolution if args.resolution else 0.125 * float(G.dist(np.vstack([x, y])).min())
    man.resolutions.append(h)
    try:
        path = qh_geodesic(G, x, y, h, window=args.window)
    except FAULTS as exc:
        raise MetricFault(0, x, y, exc) from exc
    if path.touches_window:
        print("warning: geodesic touches the grid window; enlarge --window", file=sys.stderr)
    rows = [{"index": i, **{f"x{c}": p[c] for c in range(len(p))}, "k": s}
            for i, (p, s) in enumerate(zip(path.points, path.cumulative))]
    return {"geodesic": (["index"] + [f"x{c}" for c in range(G.dim)] + ["k"], rows)}


def _replay(args) -> list:
    try:
        man = json.loads(Path(args.manifest).read_text())
        argv = list(man["argv"])
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read manifest {args.manifest}: {exc}") from exc
    # refuse to replay against specs that changed since the run
    parsed = build_parser().parse_args(argv)
    for role, flag in (("domain", "spec"), ("map", "map")):
        if role in man.get("specs", {}):
            path = getattr(parsed, flag)
            if digest(load_spec(path)) != man["specs"][role]["hash"]:
                raise UsageError(f"{role} spec {path} changed since the manifest was written")
    return argv + (["--out", args.out] if args.out else [])


def _strip_out(argv: list) -> list:
    out, skip = [], False
    for a in argv:
        if skip:
            skip = False
        elif a == "--out":
            skip = True
        elif not a.startswith("--out="):
            out.append(a)
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        if args.command == "replay":
            return main(_replay(args))
        man = RunManifest(args.command, _strip_out(argv))
        ok = True
        with np.errstate(all="ignore"):
            if args.command == "metric":
                tables = cmd_metric(args, man)
            elif args.command == "estimate":
                tables = cmd_estimate(args, man)
            elif args.command == "verify":
                tables, ok = cmd_verify(args, man)
            else:
                tables = cmd_geodesic(args, man)
        text = write_outputs(args.out, man, tables)
        if args.out is None:
            sys.stdout.write(text)
        return 0 if ok else 1
    except (UsageError, SpecError) as exc:
        print(f"apollon: error: {exc}", file=sys.stderr)
        return 2
    except FAULTS as exc:
        print(f"apollon: numerical fault: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"apollon: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
