#!/usr/bin/env python3
"""Envelope sweep from a key=value config file (see sweep_example.conf).

    python3 scripts/run_sweep.py scripts/sweep_example.conf [--out report.json]

Prints the worst pair and the empirical constants per dimension; exits
with the same codes as the CLI (0 pass, 1 failing suite, 2 config/I-O).
"""

import argparse
import sys

from ultrabound.errors import UltraboundError
from ultrabound.halfint import HalfInt
from ultrabound.harness import SweepConfig, parse_config_file, run_sweep, write_report


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("config")
    ap.add_argument("--out", help="override output_path from the config")
    args = ap.parse_args()
    try:
        values = parse_config_file(args.config)
        if args.out:
            values["output_path"] = args.out
        cfg = SweepConfig.from_mapping(values)
        report = run_sweep(cfg)
        if cfg.output_path:
            write_report(report, cfg)
    except (UltraboundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"{len(report.per_pair)} pairs in {report.wall_time_ms / 1000:.1f} s")
    for d, entry in report.global_.items():
        print(f"d={d}  grid={entry['grid_size']}  pairs={entry['n_pairs']}")
        for kind, best in entry["constants"].items():
            if best is None:
                continue
            half = entry["constants_half_range"][kind]
            half_v = f"{half['value']:.6g}" if half else "-"
            print(f"  {kind:15s} {best['value']:.6g}  (half range {half_v})  "
                  f"at l={HalfInt(best['two_ell'])}, m={HalfInt(best['two_m'])}, x={best['x']:.6g}")
        fit = entry.get("fitted_c")
        if fit:
            print(f"  fitted c: {fit['status']} c={fit['c']}")
    for name, s in report.suites.items():
        print(f"{'PASS' if s.passed else 'FAIL'} {name} {s.message}".rstrip())
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
