"""Four-point delta: stable on the half-plane, growing with the window on the
lattice complement. Prints the result dict as JSON."""

import argparse
import json
from dataclasses import replace

from apollon.experiments import GromovContrastConfig, run_gromov_contrast

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lattice-seed", type=int, default=GromovContrastConfig.lattice_seed)
    ap.add_argument("--pool", type=int, default=GromovContrastConfig.pool)
    ap.add_argument("--h", type=float, default=GromovContrastConfig.h)
    args = ap.parse_args()
    cfg = replace(GromovContrastConfig(), lattice_seed=args.lattice_seed, pool=args.pool, h=args.h)
    print(json.dumps(run_gromov_contrast(cfg), indent=2))
