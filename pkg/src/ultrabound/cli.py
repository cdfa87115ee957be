"""Command-line entry point: `python3 -m ultrabound <command> ...`.

Exit codes: 0 pass, 1 assertion failure, 2 I/O or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import asymptotics, envelopes
from .errors import ConvergenceError, UltraboundError
from .halfint import HalfInt, IndexPair
from .harness import (
    DEFAULT_TOLERANCES,
    SweepConfig,
    fit_decay_constant,
    parse_config_file,
    projection_identity_check,
    run_sweep,
    write_report,
    _jsonable,
)
from .ultra import EvalPoint, eval_X, eval_Y

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def _g(v: float) -> str:
    return f"{float(v):.17g}"


def _pair(args) -> IndexPair:
    return IndexPair.of(args.ell, args.m)


def _add_pair(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ell", required=True, help="l, e.g. 7/2")
    p.add_argument("--m", required=True, help="m, e.g. 3")


def _add_xs(p: argparse.ArgumentParser, required=True) -> None:
    p.add_argument("--x", type=float, nargs="+", required=required, help="abscissae in [-1, 1]")


def cmd_eval(args) -> int:
    p = _pair(args)
    print("x,Y" + (",X" if args.d else ""))
    for x in args.x:
        pt = EvalPoint.from_x(x)
        line = f"{_g(x)},{_g(eval_Y(p, pt))}"
        if args.d:
            line += f",{_g(eval_X(args.d, p, pt))}"
        print(line)
    return EXIT_OK


def cmd_envelope(args) -> int:
    p = _pair(args)
    rp = envelopes.RegimeParams(epsilon=args.epsilon, c=args.c, K=args.K)
    kinds = {
        "hermite": lambda pt: envelopes.hermite_envelope(args.d, p, pt, rp),
        "hermite-main": lambda pt: envelopes.hermite_main(p, pt),
        "hermite-decay": lambda pt: envelopes.hermite_decay(args.d, p, pt, rp, form=args.form),
        "bessel": lambda pt: envelopes.bessel_envelope(args.d, p, pt, rp),
        "exp": lambda pt: envelopes.exp_small_y_bound(p, pt),
        "universal": lambda pt: envelopes.universal_bound(p, pt),
        "universal-literal": lambda pt: envelopes.universal_second_literal(p, pt),
        "dimension": lambda pt: envelopes.dimension_bound(args.d, p, pt),
    }
    f = kinds[args.kind]
    print("x,envelope")
    for x in args.x:
        print(f"{_g(x)},{_g(f(EvalPoint.from_x(x)))}")
    return EXIT_OK


def cmd_zeta(args) -> int:
    p = _pair(args)
    print("x,zeta,residual")
    for x in args.x:
        s = asymptotics.zeta_solve(p, x, args.epsilon)
        print(f"{_g(x)},{_g(s.zeta)},{_g(s.residual)}")
    return EXIT_OK


def cmd_ode(args) -> int:
    p = _pair(args)
    if args.titchmarsh is not None:
        print("x_star,x,lhs,rhs,holds")
        ok = True
        for x in args.x:
            lhs, rhs = asymptotics.titchmarsh_check(p, args.titchmarsh, x)
            holds = lhs <= rhs * (1 + 1e-6)
            ok &= holds
            print(f"{_g(args.titchmarsh)},{_g(x)},{_g(lhs)},{_g(rhs)},{str(holds).lower()}")
        return EXIT_OK if ok else EXIT_FAIL
    if args.sign:
        print("x,sign_claim")
        ok = True
        for x in args.x:
            r = asymptotics.sign_check(p, x)
            ok &= r is not False
            print(f"{_g(x)},{'skipped' if r is None else str(r).lower()}")
        return EXIT_OK if ok else EXIT_FAIL
    print("x,h,residual")
    ok = True
    for x in args.x:
        h = args.h if args.h is not None else asymptotics.default_step(p, x)
        r = asymptotics.ode_residual(p, x, h)
        ok &= r <= 1e-3
        print(f"{_g(x)},{_g(h)},{_g(r)}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_projection(args) -> int:
    ell = HalfInt.of(args.ell)
    print("x,lhs,rhs,rel_error")
    lhss = []
    rhs = None
    for x in args.x:
        lhs, rhs = projection_identity_check(args.d, ell, x)
        lhss.append(lhs)
        print(f"{_g(x)},{_g(lhs)},{_g(rhs)},{_g(abs(lhs / rhs - 1))}")
    spread = (max(lhss) - min(lhss)) / rhs
    ok = all(abs(v / rhs - 1) <= args.tol for v in lhss) and spread <= args.tol
    print(f"# spread={_g(spread)} {'PASS' if ok else 'FAIL'}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


def _sweep_config(args) -> SweepConfig:
    values = parse_config_file(args.config) if args.config else {}
    flag_map = {
        "d_list": args.d_list, "ell_max": args.ell_max, "x_grid_size": args.x_grid_size,
        "epsilon": args.epsilon, "K": args.K, "c": args.c, "parallelism": args.parallelism,
        "output_path": args.output, "output_format": args.format,
    }
    for k, v in flag_map.items():
        if v is not None:
            values[k] = v
    if args.no_extra_points:
        values["extra_points"] = "false"
    if args.no_fit_c:
        values["fit_c"] = "false"
    for item in args.tol or []:
        if "=" not in item:
            raise UltraboundError(f"--tol expects name=value, got {item!r}")
        k, v = item.split("=", 1)
        values[f"tol.{k}"] = v
    return SweepConfig.from_mapping(values)


def cmd_sweep(args) -> int:
    cfg = _sweep_config(args)
    report = run_sweep(cfg)
    if cfg.output_path:
        write_report(report, cfg)
    else:
        sys.stdout.write(report.to_csv() if cfg.output_format == "csv" else report.to_json())
    for name, s in report.suites.items():
        print(f"{'PASS' if s.passed else 'FAIL'} {name} {s.message}".rstrip(), file=sys.stderr)
    if not report.passed:
        print(f"failing suites: {', '.join(report.failing())}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_fit_c(args) -> int:
    fit = fit_decay_constant(args.d, HalfInt.of(args.ell_max), args.epsilon, args.K, args.x_grid_size,
                             args.growth, args.parallelism)
    print(json.dumps(_jsonable(fit.to_dict()), indent=2))
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .suites import SUITES, run_suites

    names = args.suite or list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise UltraboundError(f"unknown suite(s) {unknown}; choose from {list(SUITES)}")
    results = run_suites(names, quick=args.quick)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name} {r.message}".rstrip())
    if args.json:
        with open(args.json, "w", newline="\n") as fh:
            json.dump({r.name: r.to_dict() for r in results}, fh, indent=2, allow_nan=False)
            fh.write("\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ultrabound", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate Y_{l,m}(x) and optionally X^d_{l,m}(x)")
    _add_pair(p)
    _add_xs(p)
    p.add_argument("--d", type=int, default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("envelope", help="evaluate an envelope function")
    _add_pair(p)
    _add_xs(p)
    p.add_argument("--kind", default="hermite",
                   choices=["hermite", "hermite-main", "hermite-decay", "bessel", "exp", "universal",
                            "universal-literal", "dimension"])
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--K", type=float, default=2.0)
    p.add_argument("--c", type=float, default=0.05)
    p.add_argument("--form", choices=["corollary", "theorem"], default="corollary")
    p.set_defaults(func=cmd_envelope)

    p = sub.add_parser("zeta", help="solve the implicit equation for zeta_{l,m}(x)")
    _add_pair(p)
    _add_xs(p)
    p.add_argument("--epsilon", type=float, default=0.5)
    p.set_defaults(func=cmd_zeta)

    p = sub.add_parser("ode", help="ODE residual, sign claim or Titchmarsh inequality for L")
    _add_pair(p)
    _add_xs(p)
    p.add_argument("--h", type=float, default=None)
    p.add_argument("--sign", action="store_true", help="check L L' < 0 instead")
    p.add_argument("--titchmarsh", type=float, default=None, metavar="X_STAR",
                   help="check the decay inequality from X_STAR to each x")
    p.set_defaults(func=cmd_ode)

    p = sub.add_parser("projection", help="check the projection-kernel identity")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--ell", required=True)
    p.add_argument("--x", type=float, nargs="+", default=[0.0, 0.3, -0.3, 0.9, -0.9, 0.999, -0.999])
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_projection)

    p = sub.add_parser("sweep", help="envelope sweep with report output")
    p.add_argument("--config", help="key=value configuration file (flags override it)")
    p.add_argument("--d-list", dest="d_list", help="comma-separated dimensions, e.g. 2,3")
    p.add_argument("--ell-max", dest="ell_max")
    p.add_argument("--x-grid-size", dest="x_grid_size")
    p.add_argument("--epsilon")
    p.add_argument("--K")
    p.add_argument("--c")
    p.add_argument("--tol", action="append", metavar="NAME=VALUE",
                   help=f"tolerance override; names: {', '.join(DEFAULT_TOLERANCES)}")
    p.add_argument("--parallelism")
    p.add_argument("--output", help="output file (default: stdout)")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--no-extra-points", action="store_true", help="use the Chebyshev grid only")
    p.add_argument("--no-fit-c", action="store_true", help="skip the decay-constant fit")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fit-c", help="fit the decay constant c")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--ell-max", dest="ell_max", default="200")
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--K", type=float, default=2.0)
    p.add_argument("--x-grid-size", dest="x_grid_size", type=int, default=2001)
    p.add_argument("--growth", type=float, default=DEFAULT_TOLERANCES["decay_growth"])
    p.add_argument("--parallelism", type=int, default=1)
    p.set_defaults(func=cmd_fit_c)

    p = sub.add_parser("selftest", help="run invariant suites")
    p.add_argument("--suite", action="append", help="suite name (repeatable; default: all)")
    p.add_argument("--quick", action="store_true", help="reduced ranges")
    p.add_argument("--json", help="write suite results to this file")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UltraboundError, OSError, ConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
