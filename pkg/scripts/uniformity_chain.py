"""Uniformity constants of a source sample and of its image under inversion."""

import argparse
import json

from apollon.experiments import UniformityChainConfig, run_uniformity_chain

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print(json.dumps(run_uniformity_chain(UniformityChainConfig(args.count, args.seed)), indent=2))
