#!/usr/bin/env python3
"""Decay-constant fit c for several K and degree ranges.

    python3 scripts/fit_decay.py --ell-max 100 200 --K 1.25 1.5 2 3
"""

import argparse

from ultrabound.harness import fit_decay_constant


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--ell-max", type=int, nargs="+", default=[100, 200])
    ap.add_argument("--K", type=float, nargs="+", default=[1.25, 1.5, 2.0, 3.0])
    ap.add_argument("--epsilon", type=float, default=0.5)
    ap.add_argument("--d", type=int, default=2)
    ap.add_argument("--grid", type=int, default=2001)
    ap.add_argument("--parallelism", type=int, default=1)
    args = ap.parse_args()
    print("ell_max,K,status,c,C,n_points,monotone")
    for L in args.ell_max:
        for K in args.K:
            f = fit_decay_constant(args.d, L, args.epsilon, K, args.grid, parallelism=args.parallelism)
            c = "" if f.c is None else f"{f.c:.6f}"
            C = "" if f.C is None else f"{f.C:.6g}"
            print(f"{L},{K:g},{f.status},{c},{C},{f.n_points},{f.monotone}", flush=True)


if __name__ == "__main__":
    main()
