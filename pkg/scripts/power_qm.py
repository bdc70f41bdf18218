"""Measured theta envelope and rough-Apollonian constants of a radial power map
on the punctured plane."""

import argparse
import json

from apollon.experiments import PowerQMConfig, run_power_qm

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--exponent", type=float, default=2.0)
    ap.add_argument("--count", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=3)
    ap.add_argument("--table", action="store_true", help="also print the binned theta table")
    args = ap.parse_args()
    res = run_power_qm(PowerQMConfig(args.exponent, args.count, seed=args.seed))
    if not args.table:
        res.pop("table")
    print(json.dumps(res, indent=2, default=lambda o: o.tolist() if hasattr(o, "tolist") else str(o)))
