#!/usr/bin/env python3
"""Run every invariant suite (full settings unless --quick) and print a
table of pass/fail, key metric and runtime.

    python3 scripts/selftest.py [--quick] [--json results.json]
"""

import argparse
import json
import sys
import time

from ultrabound.harness import _jsonable
from ultrabound.suites import QUICK, SUITES


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--quick", action="store_true")
    ap.add_argument("--json")
    args = ap.parse_args()
    results = {}
    for name, fn in SUITES.items():
        t0 = time.perf_counter()
        r = fn(**(QUICK.get(name, {}) if args.quick else {}))
        dt = time.perf_counter() - t0
        results[name] = dict(r.to_dict(), seconds=dt)
        print(f"{'PASS' if r.passed else 'FAIL'}  {name:20s} {dt:7.1f} s  {r.message}", flush=True)
    if args.json:
        with open(args.json, "w", newline="\n") as fh:
            json.dump(_jsonable(results), fh, indent=2)
            fh.write("\n")
    return 0 if all(v["passed"] for v in results.values()) else 1


if __name__ == "__main__":
    sys.exit(main())
