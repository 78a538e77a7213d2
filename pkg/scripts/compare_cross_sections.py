"""Tabulate k*sigma for several bare couplings against the delta limit.

    python3 scripts/compare_cross_sections.py [--E0 1] [--mu 0.5] [--out table.csv]
"""
import argparse
import csv
import math
import sys

import numpy as np

from leemodel import PhysicalParams, total_cross_section


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--E0", type=float, default=1.0)
    ap.add_argument("--mu", type=float, default=0.5)
    ap.add_argument("--couplings", type=float, nargs="+", default=[1.0, 10.0, 100.0, 1000.0])
    ap.add_argument("--n", type=int, default=60)
    ap.add_argument("--out", help="CSV path; stdout when omitted")
    args = ap.parse_args(argv)

    ks = np.geomspace(1e-2, 1e2, args.n) * math.sqrt(2 * args.mu * args.E0)
    couplings = list(args.couplings) + [math.inf]
    models = [PhysicalParams(args.E0, args.mu, g) for g in couplings]
    header = ["k"] + [f"k_sigma_g0sq_{'inf' if math.isinf(g) else format(g, 'g')}" for g in couplings]

    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    for k in ks:
        w.writerow([format(k, ".10g")] + [format(k * total_cross_section(p, k), ".10g") for p in models])
    if args.out:
        fh.close()


if __name__ == "__main__":
    main()
