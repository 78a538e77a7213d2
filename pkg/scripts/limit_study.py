"""Convergence of sigma(g0^2) to the delta limit across momenta.

Prints the fitted log-log slope of |sigma(g0^2) - sigma(inf)| against
1/g0^2 for each k.  Expect 1 off the bound-state shell and 2 on it.

    python3 scripts/limit_study.py [--E0 1] [--mu 0.5]
"""
import argparse
import math

import numpy as np

from leemodel.verify import limit_convergence_study


def main(argv=None):
    ap = argparse.ArgumentParser(description="slope of the approach to the delta limit")
    ap.add_argument("--E0", type=float, default=1.0)
    ap.add_argument("--mu", type=float, default=0.5)
    ap.add_argument("--gmin", type=float, default=1e2)
    ap.add_argument("--gmax", type=float, default=1e6)
    args = ap.parse_args(argv)

    grid = np.geomspace(args.gmin, args.gmax, 41)
    k_shell = math.sqrt(2 * args.mu * args.E0)
    print(f"{'k':>10} {'L':>9} {'slope':>8}")
    for k in sorted({*(k_shell * np.array([0.1, 0.3, 0.5, 2.0, 3.0, 10.0])), k_shell}):
        L = math.log(k * k / (2 * args.mu * args.E0))
        print(f"{k:10.4g} {L:9.4f} {limit_convergence_study(k, args.mu, args.E0, grid):8.4f}")


if __name__ == "__main__":
    main()
