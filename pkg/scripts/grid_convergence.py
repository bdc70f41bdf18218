"""Grid k against closed forms as h shrinks, for the half-plane and the
punctured plane."""

import argparse
import math

from apollon import HalfSpace, PuncturedSpace, qh_distance, qh_distance_exact

CASES = [
    ("half_plane", HalfSpace([0.0, 1.0], 0.0), [0.0, 1.0], [0.0, math.e]),
    ("half_plane_oblique", HalfSpace([0.0, 1.0], 0.0), [-1.0, 0.5], [1.5, 2.0]),
    ("punctured_antipodal", PuncturedSpace([0.0, 0.0]), [1.0, 0.0], [-1.0, 0.0]),
]

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--steps", type=float, nargs="+", default=[0.08, 0.04, 0.02, 0.01])
    args = ap.parse_args()
    print("case,h,k_grid,k_exact,rel_err")
    for name, G, x, y in CASES:
        exact = qh_distance_exact(G, x, y).value
        for h in args.steps:
            k = qh_distance(G, x, y, h).value
            print(f"{name},{h:g},{k:.6f},{exact:.6f},{abs(k - exact) / exact:.3e}")
