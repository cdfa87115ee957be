#!/usr/bin/env python3
"""Empirical envelope constants R_H, R_B as the degree range grows.

For each L in the list, reports the largest |X|/envelope over all pairs
with l <= L in the Hermite (m >= eps l) and Bessel (m <= eps l) regimes,
and the grid-refinement check (grid size doubled minus one).

    python3 scripts/envelope_stability.py --L 50 100 200 400 --grid 2001
"""

import argparse

from ultrabound.envelopes import RegimeParams
from ultrabound.halfint import HalfInt
from ultrabound.harness import _column_tasks, _reduce_constants, _run_tasks, chebyshev_grid


def constants(d, L, grid_size, epsilon, parallelism):
    tasks = _column_tasks(d, HalfInt.of(L), chebyshev_grid(grid_size), RegimeParams(epsilon=epsilon), False,
                          ("C_H_main", "C_B"), False, False)
    pairs = [pr for res in _run_tasks(tasks, parallelism) for pr in res.pairs]
    full = _reduce_constants(pairs)
    return full["C_H_main"], full["C_B"]


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--L", type=int, nargs="+", default=[50, 100, 200, 400])
    ap.add_argument("--grid", type=int, default=2001)
    ap.add_argument("--d", type=int, default=2)
    ap.add_argument("--epsilon", type=float, default=0.5)
    ap.add_argument("--parallelism", type=int, default=1)
    args = ap.parse_args()
    print("L,grid,R_H,argmax_H,R_B,argmax_B")
    for L in args.L:
        for g in (args.grid, 2 * args.grid - 1):
            h, b = constants(args.d, L, g, args.epsilon, args.parallelism)
            fh = f"{h['value']:.8g},l={HalfInt(h['two_ell'])} m={HalfInt(h['two_m'])} x={h['x']:.4g}" if h else "nan,"
            fb = f"{b['value']:.8g},l={HalfInt(b['two_ell'])} m={HalfInt(b['two_m'])} x={b['x']:.4g}" if b else "nan,"
            print(f"{L},{g},{fh},{fb}", flush=True)


if __name__ == "__main__":
    main()
