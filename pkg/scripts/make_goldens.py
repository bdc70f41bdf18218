"""Regenerate the pinned CLI outputs in tests/golden (run from anywhere)."""

import os
from pathlib import Path

from apollon.cli import main

GOLDEN = Path(__file__).resolve().parent.parent / "tests" / "golden"

CASES = {
    "metric_half_plane.csv": ["metric", "alpha", "--spec", "half_plane.yaml", "--count", "25", "--seed", "3",
                              "--window=-5,0:5,5"],
    "uniformity_punctured.csv": ["estimate", "uniformity", "--spec", "punctured.yaml", "--count", "300",
                                 "--seed", "11", "--window=-2,-2:2,2"],
    "gromov_half_plane.csv": ["estimate", "gromov", "--spec", "half_plane.yaml", "--count", "500", "--seed", "7",
                              "--window=-5,0:5,5"],
}

if __name__ == "__main__":
    os.chdir(GOLDEN)
    for name, argv in CASES.items():
        assert main(argv + ["--out", name]) == 0, name
        print("wrote", GOLDEN / name)
