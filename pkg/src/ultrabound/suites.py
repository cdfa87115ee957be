"""Invariant suites. Each returns a SuiteResult with pass/fail, the
measured metrics, and a message naming what failed. Default arguments
are the full acceptance settings; QUICK holds reduced settings for smoke
runs.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .asymptotics import (
    L_values,
    default_step,
    ode_residual_array,
    sign_check_array,
    sqrt_q_integral,
    zeta_solve,
)
from .envelopes import RegimeParams
from .halfint import HalfInt, IndexPair, enumerate_I, transition_points
from .harness import (
    SuiteResult,
    SweepConfig,
    _column_tasks,
    _reduce_constants,
    _run_tasks,
    chebyshev_grid,
    fit_decay_constant,
    projection_lhs,
    projection_rhs,
    run_sweep,
)
from .specfun import bessel_j, bessel_j_family, gauss_legendre
from .ultra import eval_Y_array, y_table


# ---------------------------------------------------------------------------
# quadrature for integrals of Y products

def _theta_trapezoid(n: int):
    """n-node trapezoid rule in theta on [0, pi], mapped to x = cos(theta);
    weights include the Jacobian sin(theta)."""
    theta = np.linspace(0.0, np.pi, n)
    w = np.full(n, np.pi / (n - 1))
    w[0] = w[-1] = 0.5 * np.pi / (n - 1)
    return np.cos(theta), w * np.sin(theta)


def product_rule(m: HalfInt, n: int):
    """Nodes and weights integrating Y_{l,m} Y_{l',m} exactly for l + l' < n - 1.

    Half-integer m: Y Y' sin(theta) is a cosine polynomial of degree
    l + l', integrated exactly by the theta-trapezoid rule. Integer m:
    Y Y' is a polynomial of degree l + l' - 1, integrated exactly by
    Gauss-Legendre.
    """
    if m.is_integer():
        rule = gauss_legendre(n)
        return rule.nodes, rule.weights
    return _theta_trapezoid(n)


def normalization_suite(ell_max=60, tol=1e-8) -> SuiteResult:
    worst, worst_pair = 0.0, None
    n_pairs = 0
    for p in enumerate_I(ell_max):
        n = 2 * math.ceil(float(p.ell)) + 16
        x, w = product_rule(p.m, n)
        err = abs(float(np.dot(w, eval_Y_array(p, x) ** 2)) - 1.0)
        n_pairs += 1
        if err > worst:
            worst, worst_pair = err, str(p)
    ok = worst <= tol
    return SuiteResult("normalization", ok,
                       {"n_pairs": n_pairs, "max_error": worst, "worst_pair": worst_pair, "tol": tol},
                       "" if ok else f"normalization error {worst:.3g} at {worst_pair}")


def orthogonality_suite(ell_max=40, tol=1e-8) -> SuiteResult:
    top = HalfInt.of(ell_max)
    n = 2 * math.ceil(float(top)) + 16
    worst, worst_at, n_products = 0.0, None, 0
    for two_m in range(0, top.twice):
        m = HalfInt(two_m)
        x, w = product_rule(m, n)
        two_ells, T = y_table(m, top, x)
        if len(two_ells) < 2:
            continue
        G = (T * w) @ T.T
        off = np.abs(G - np.diag(np.diag(G)))
        n_products += len(two_ells) * (len(two_ells) - 1) // 2
        i, j = np.unravel_index(int(np.argmax(off)), off.shape)
        if off[i, j] > worst:
            worst = float(off[i, j])
            worst_at = f"m={m}, l={HalfInt(two_ells[i])}, l'={HalfInt(two_ells[j])}"
    ok = worst <= tol
    return SuiteResult("orthogonality", ok,
                       {"n_products": n_products, "max_abs_inner": worst, "worst": worst_at, "tol": tol},
                       "" if ok else f"inner product {worst:.3g} at {worst_at}")


def parity_suite(n_samples=10_000, ell_max=100, seed=12345, tol=1e-12) -> SuiteResult:
    rng = np.random.default_rng(seed)
    pairs = enumerate_I(ell_max)
    pick = rng.integers(0, len(pairs), n_samples)
    xs = rng.uniform(-1.0, 1.0, n_samples)
    worst, worst_at = 0.0, None
    for k in np.unique(pick):
        p = pairs[k]
        x = xs[pick == k]
        yp = eval_Y_array(p, x)
        ym = eval_Y_array(p, -x)
        s = -1.0 if p.degree % 2 else 1.0
        diff = np.abs(ym - s * yp)
        scale = np.abs(yp)
        rel = np.where(scale > 0, diff / np.where(scale > 0, scale, 1.0), np.where(diff > 0, np.inf, 0.0))
        j = int(np.argmax(rel))
        if rel[j] > worst:
            worst, worst_at = float(rel[j]), f"{p} x={float(x[j])!r}"
    ok = worst <= tol
    return SuiteResult("parity", ok, {"n_samples": n_samples, "max_rel_error": worst, "worst": worst_at,
                                      "tol": tol},
                       "" if ok else f"parity error {worst:.3g} at {worst_at}")


def projection_suite(d_list=(2, 3, 4, 5), ell_extra=30, xs=(0.0, 0.3, -0.3, 0.9, -0.9, 0.999, -0.999),
                     tol=1e-8) -> SuiteResult:
    xs = np.array(xs, dtype=float)
    worst_rel, worst_spread, worst_at = 0.0, 0.0, None
    n_checks = 0
    for d in d_list:
        for two_ell in range(d - 1, d - 1 + 2 * ell_extra + 1, 2):
            ell = HalfInt(two_ell)
            lhs = projection_lhs(d, ell, xs)
            rhs = projection_rhs(d, ell)
            rel = float(np.max(np.abs(lhs / rhs - 1.0)))
            spread = float((lhs.max() - lhs.min()) / rhs)
            n_checks += xs.size
            if rel > worst_rel:
                worst_rel, worst_at = rel, f"d={d}, l={ell}"
            worst_spread = max(worst_spread, spread)
    ok = worst_rel <= tol and worst_spread <= tol
    return SuiteResult("projection", ok,
                       {"n_checks": n_checks, "max_rel_error": worst_rel, "max_rel_spread": worst_spread,
                        "worst": worst_at, "tol": tol},
                       "" if ok else f"projection identity off by {worst_rel:.3g} (spread {worst_spread:.3g})")


def envelope_stability_suite(L=400, grid_size=2001, epsilon=0.5, d=2, factor=1.1, ratio_max=100.0,
                             parallelism=1) -> SuiteResult:
    t0 = time.perf_counter()
    rp = RegimeParams(epsilon=epsilon)
    tasks = _column_tasks(d, HalfInt.of(L), chebyshev_grid(grid_size), rp, False,
                          ("C_H_main", "C_B"), False, False)
    pairs = [pr for res in _run_tasks(tasks, parallelism) for pr in res.pairs]
    full = _reduce_constants(pairs)
    half = _reduce_constants(pairs, float(HalfInt.of(L)) / 2)
    R_H, R_H2 = full["C_H_main"]["value"], half["C_H_main"]["value"]
    R_B, R_B2 = full["C_B"]["value"], half["C_B"]["value"]
    ok = (R_H <= factor * R_H2 and R_B <= factor * R_B2
          and all(math.isfinite(v) and v < ratio_max for v in (R_H, R_B)))
    return SuiteResult("envelope_stability", ok,
                       {"L": L, "grid_size": grid_size, "n_pairs": len(pairs),
                        "R_H": R_H, "R_H_half": R_H2, "R_B": R_B, "R_B_half": R_B2,
                        "argmax_H": full["C_H_main"], "argmax_B": full["C_B"],
                        "seconds": time.perf_counter() - t0},
                       "" if ok else "envelope sup-ratio not stable under range doubling")


def bessel_lemma_suite(nu_max=200.0, z_max=500.0, z_step=0.05, bound=0.7) -> SuiteResult:
    t0 = time.perf_counter()
    nz = int(round(z_max / z_step)) + 1
    z = np.linspace(0.0, z_max, nz)
    best, best_at = 0.0, None
    for nu0 in (0.0, 0.5):
        kmax = int(math.floor(nu_max - nu0))
        J = bessel_j_family(nu0, kmax, z)
        ks = np.arange(kmax + 1)
        nus = nu0 + ks
        use = nus >= 1.0
        vals = np.abs(J[use]) * (nus[use] ** (1.0 / 3.0))[:, None]
        i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
        if vals[i, j] > best:
            best, best_at = float(vals[i, j]), (float(nus[use][i]), float(z[j]))
    # cross-check the maximiser through the scalar dispatcher
    check = best_at[0] ** (1 / 3) * abs(bessel_j(*best_at))
    ok = best <= bound and abs(check - best) <= 1e-10
    return SuiteResult("bessel_lemma", ok,
                       {"sup": best, "argmax_nu_z": best_at, "scalar_check": check, "bound": bound,
                        "seconds": time.perf_counter() - t0},
                       "" if ok else f"sup nu^(1/3)|J| = {best:.6g} exceeds {bound}")


def _zeta_pair(args):
    two_ell, two_m, n_grid = args
    p = IndexPair.from_twice(two_ell, two_m)
    td = transition_points(p)
    a, b2 = td.a, td.b * td.b
    xs = np.unique(np.concatenate([np.linspace(0.0, 1.0, n_grid - 1), [a]]))
    z = np.empty(xs.size)
    res = 0.0
    for i, x in enumerate(xs):
        s = zeta_solve(p, float(x))
        z[i] = s.zeta
        res = max(res, s.residual)
    boundary = abs(zeta_solve(p, a).zeta - b2)
    # approach a from both sides through the solver proper
    for x in (a * (1 - 1e-12), min(a * (1 + 1e-12), 1.0)):
        boundary = max(boundary, abs(zeta_solve(p, x).zeta - b2))
    monotone = bool(np.all(np.diff(z) < 0))
    lower = xs >= a
    y2 = (1.0 - xs[lower]) * (1.0 + xs[lower])
    # y^2 inherits the rounding of x amplified by 1/y^2 (an absolute error
    # of about 2|x| ulp); at x = a both sides agree exactly in real arithmetic
    slack = 4.0 * np.abs(xs[lower]) * 2.0 ** -52 + 1e-14 * y2
    excess = float(np.max(z[lower] - y2 - slack, initial=-np.inf))
    sqrt_ok = bool(np.all(z[lower] <= y2 + slack))
    return res, boundary, monotone, sqrt_ok, excess


def zeta_suite(ell_max=80, n_grid=200, tol=1e-10, parallelism=1) -> SuiteResult:
    t0 = time.perf_counter()
    pairs = [p for p in enumerate_I(ell_max) if 0 < p.m.twice and 2 * p.m.twice <= p.ell.twice]
    args = [(p.ell.twice, p.m.twice, n_grid) for p in pairs]
    if parallelism > 1:
        with ProcessPoolExecutor(parallelism) as pool:
            out = list(pool.map(_zeta_pair, args, chunksize=16))
    else:
        out = [_zeta_pair(a) for a in args]
    max_res = max((o[0] for o in out), default=0.0)
    max_bnd = max((o[1] for o in out), default=0.0)
    bad_mono = [str(p) for p, o in zip(pairs, out) if not o[2]]
    bad_sqrt = [str(p) for p, o in zip(pairs, out) if not o[3]]
    ok = max_res <= tol and max_bnd <= tol and not bad_mono and not bad_sqrt
    return SuiteResult("zeta", ok,
                       {"n_pairs": len(pairs), "max_residual": max_res, "max_boundary_error": max_bnd,
                        "non_monotone": bad_mono[:10], "sqrt_violations": bad_sqrt[:10],
                        "max_zeta_minus_y2_minus_slack": max((o[4] for o in out), default=-math.inf),
                        "seconds": time.perf_counter() - t0},
                       "" if ok else "zeta solver invariant violated")


def ode_suite(ell_max=100, n_x=41, n_sign=50, tol=1e-3, slack=1e-6) -> SuiteResult:
    t0 = time.perf_counter()
    # (1) Richardson residual of L'' = Q L, m > 1, |x| <= 1 - 1e-3
    k = np.arange(n_x)
    xs = (1 - 1e-3) * np.sin(np.pi * (2 * k - (n_x - 1)) / (2 * (n_x - 1)))
    worst_res, worst_res_at, n_res = 0.0, None, 0
    pairs = [p for p in enumerate_I(ell_max) if p.m.twice > 2]
    for p in pairs:
        h = np.array([default_step(p, float(x)) for x in xs])
        r = ode_residual_array(p, xs, h)
        n_res += r.size
        j = int(np.argmax(r))
        if r[j] > worst_res:
            worst_res, worst_res_at = float(r[j]), f"{p} x={float(xs[j])!r}"

    # (2) sign claim, (3) Titchmarsh, (4) decay of |L| towards 1
    n_signed = n_skipped = 0
    sign_fail = []
    t_worst, t_worst_at, n_t = 0.0, None, 0
    limit_fail = []
    for p in pairs:
        xbar = transition_points(p).xbar
        ks = np.arange(2, 7)
        xk = 1.0 - 10.0 ** (-ks.astype(float))
        xk = xk[xk > xbar]
        if xk.size >= 2:
            Lk = np.abs(L_values(p, xk))
            nz = Lk > 0
            if not (np.all(np.diff(Lk[nz]) < 0) and np.all(nz[:-1] >= nz[1:])):
                limit_fail.append(str(p))
        if 2 * p.m.twice < p.ell.twice:
            continue
        top = 1.0 - 1e-4
        if not xbar < top:
            continue
        pts = xbar + (top - xbar) * np.arange(1, n_sign + 1) / n_sign
        s = sign_check_array(p, pts)
        n_signed += int(np.sum(s >= 0))
        n_skipped += int(np.sum(s < 0))
        if np.any(s == 0):
            sign_fail.append(f"{p} x={float(pts[int(np.argmin(s != 0))])!r}")
        L = np.abs(L_values(p, pts))
        for i_star in (0, n_sign // 5, n_sign // 2):
            for i in sorted({i_star, i_star + 1, i_star + 5, i_star + 15, n_sign - 1}):
                if i >= n_sign:
                    continue
                integral = sqrt_q_integral(p, pts[i_star], pts[i]) if i > i_star else 0.0
                rhs = L[i_star] * math.exp(-integral)
                n_t += 1
                if L[i] > rhs * (1 + slack):
                    ratio = L[i] / rhs
                    if ratio > t_worst:
                        t_worst, t_worst_at = ratio, f"{p} x*={float(pts[i_star])!r} x={float(pts[i])!r}"
    ok = worst_res <= tol and not sign_fail and t_worst_at is None and not limit_fail
    return SuiteResult("ode", ok,
                       {"n_residual_points": n_res, "max_residual": worst_res, "worst_residual": worst_res_at,
                        "n_sign_points": n_signed, "n_sign_skipped": n_skipped, "sign_failures": sign_fail[:10],
                        "n_titchmarsh": n_t, "titchmarsh_worst_excess": t_worst,
                        "titchmarsh_worst": t_worst_at, "limit_failures": limit_fail[:10],
                        "seconds": time.perf_counter() - t0},
                       "" if ok else "ODE invariant violated")


def decay_fit_suite(d=2, ell_max=200, epsilon=0.5, K=2.0, grid_size=2001, K_compare=1.5) -> SuiteResult:
    fit = fit_decay_constant(d, ell_max, epsilon, K, grid_size)
    other = fit_decay_constant(d, ell_max, epsilon, K_compare, grid_size)
    ok = fit.status == "ok" and fit.c is not None and fit.c > 0
    return SuiteResult("decay_fit", ok,
                       {"fit": fit.to_dict(), f"fit_K={K_compare:g}": other.to_dict(),
                        "non_increasing_as_K_decreases": (other.c is not None and fit.c is not None
                                                          and other.c <= fit.c)},
                       "" if ok else f"decay fit status {fit.status}")


def determinism_suite(d_list=(2, 3), ell_max=30, grid_size=201, workers=(1, 4)) -> SuiteResult:
    texts = []
    for w in workers:
        cfg = SweepConfig(d_list=list(d_list), ell_max=ell_max, x_grid_size=grid_size, parallelism=w)
        texts.append(run_sweep(cfg).to_json(wall_time=False))
    ok = all(t == texts[0] for t in texts)
    return SuiteResult("determinism", ok, {"workers": list(workers), "bytes": len(texts[0])},
                       "" if ok else "sweep JSON differs across worker counts")


SUITES = {
    "normalization": normalization_suite,
    "projection": projection_suite,
    "orthogonality": orthogonality_suite,
    "parity": parity_suite,
    "envelope_stability": envelope_stability_suite,
    "bessel_lemma": bessel_lemma_suite,
    "zeta": zeta_suite,
    "ode": ode_suite,
    "decay_fit": decay_fit_suite,
    "determinism": determinism_suite,
}

QUICK = {
    "normalization": {"ell_max": 20},
    "projection": {"ell_extra": 10},
    "orthogonality": {"ell_max": 15},
    "parity": {"n_samples": 1000},
    "envelope_stability": {"L": 60, "grid_size": 401},
    "bessel_lemma": {"nu_max": 50.0, "z_max": 100.0},
    "zeta": {"ell_max": 12, "n_grid": 50},
    "ode": {"ell_max": 20, "n_x": 21},
    "decay_fit": {"ell_max": 60, "grid_size": 401},
    "determinism": {"ell_max": 10, "grid_size": 51},
}


def run_suites(names=None, quick=False) -> list:
    names = list(SUITES) if names is None else list(names)
    out = []
    for name in names:
        kw = QUICK.get(name, {}) if quick else {}
        out.append(SUITES[name](**kw))
    return out
