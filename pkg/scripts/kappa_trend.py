"""CV-selected ridge penalty versus sample size, with the true graph imposed.

    python scripts/kappa_trend.py --seeds 10 --n 15 50 200 1000
"""
import argparse
import csv
import sys

import numpy as np

from ridgecov.experiments import ridge_path_kappa


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, default=20)
    ap.add_argument("--density", type=float, default=0.3)
    ap.add_argument("--n", type=int, nargs="+", default=[15, 50, 200, 1000])
    ap.add_argument("--seeds", type=int, default=10)
    args = ap.parse_args()

    out = csv.writer(sys.stdout)
    out.writerow(["n", "seed", "kappa"])
    medians = {}
    for n in args.n:
        kappas = [ridge_path_kappa(n, seed, p=args.p, density=args.density)
                  for seed in range(args.seeds)]
        for seed, kappa in enumerate(kappas):
            out.writerow([n, seed, kappa])
        medians[n] = np.median(kappas)
    print("# median kappa: " + ", ".join(f"n={n}: {k:.4f}" for n, k in medians.items()),
          file=sys.stderr)


if __name__ == "__main__":
    main()
