#!/usr/bin/env python3
"""Measure degree histograms of partial k-trees over a grid of retention
fractions b.

The edge-thinned construction has no known degree law (an earlier claimed
exponent was retracted), so this script only reports what it measures:
per-b tail fits and summary statistics, never a theoretical curve.

Example:
    python scripts/partial_ktree_scan.py --k 4 --n 200000 --b-grid 0.5 0.75 1.0
"""

import argparse

import numpy as np

import ktree_lab as kl
from ktree_lab import analysis


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=int, default=4)
    ap.add_argument("--n", type=int, default=200_000)
    ap.add_argument("--seed", type=int, default=17)
    ap.add_argument("--b-grid", type=float, nargs="+", default=[0.5, 0.75, 1.0])
    ap.add_argument("--d-min", type=int, default=10)
    args = ap.parse_args()

    print(f"k={args.k} n={args.n} seed={args.seed}  (full-tree theory gamma: "
          f"{kl.tail_exponent(args.k)})")
    print(f"{'b':>6} {'kept':>5} {'min deg':>8} {'mean deg':>9} {'max deg':>8} {'gamma_hat':>10}")
    for b in args.b_grid:
        graph = kl.generate_partial(kl.ProcessParams(k=args.k, n=args.n, seed=args.seed), b)
        deg = graph.degrees()
        hist = analysis.DegreeHistogram.from_degrees(args.k, deg)
        try:
            fitted = f"{kl.fit_tail_exponent(hist, d_min=args.d_min).gamma_hat:10.4f}"
        except kl.InsufficientTail:
            fitted = "tail too short"
        print(f"{b:>6.3f} {graph.retained_out_degree:>5} {deg.min():>8} "
              f"{np.mean(deg):>9.3f} {deg.max():>8} {fitted:>10}")


if __name__ == "__main__":
    main()
