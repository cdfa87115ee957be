"""The Boyd-Dunster map zeta_{l,m}, the ODE L'' = Q L with
L = (1-x^2)^{1/2} Y, and the Titchmarsh decay inequality.

zeta is defined implicitly by matching

    upper (x <= a):  int_{b^2}^{zeta} (xi-b^2)^{1/2}/(2 xi) dxi = int_x^a (a^2-s^2)^{1/2}/(1-s^2) ds
    lower (x >= a):  int_{zeta}^{b^2} (b^2-xi)^{1/2}/(2 xi) dxi = int_a^x (s^2-a^2)^{1/2}/(1-s^2) ds

With u = sqrt|xi - b^2| the left sides integrate to

    F_up(zeta) = U - b arctan(U/b),                 U = sqrt(zeta - b^2)
    F_lo(zeta) = -U + (b/2) log((b+U)^2 / zeta),    U = sqrt(b^2 - zeta)

(the second uses b - U = zeta/(b+U)). The right sides are integrated
numerically after s = a sin t (upper) and s = a cosh u (lower), which
remove the square-root endpoint singularity at s = a.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import quad

from .errors import ConvergenceError, DegenerateIndexError, DomainError, WrongRegimeError
from .halfint import IndexPair, q_value, require_I, transition_points
from .ultra import eval_Y_array

MAX_ITER = 200


@dataclass(frozen=True)
class ZetaSolution:
    pair: IndexPair
    x: float
    zeta: float
    residual: float
    # zeta - b^2, kept separately for accuracy near the transition point
    offset: float


def _t_minus_atan(s: float) -> float:
    """s - arctan(s), by its series for small s (no cancellation)."""
    if s < 0.1:
        s2 = s * s
        term, total, k = s * s2, 0.0, 3
        while True:
            total += term / k
            term *= -s2
            k += 2
            if abs(term) < 1e-18 * total:
                return total
    return s - math.atan(s)


def _atanh_minus_t(t: float) -> float:
    """artanh(t) - t for 0 <= t < 1, by its series for small t."""
    if t < 0.1:
        t2 = t * t
        term, total, k = t * t2, 0.0, 3
        while True:
            total += term / k
            term *= t2
            k += 2
            if term < 1e-18 * total:
                return total
    return math.atanh(t) - t


def lhs_upper(zeta: float, b: float) -> float:
    u = math.sqrt(max(zeta - b * b, 0.0))
    return _lhs_upper_u(u, b)


def lhs_lower(zeta: float, b: float) -> float:
    if zeta == 0.0:
        return math.inf
    u = math.sqrt(max(b * b - zeta, 0.0))
    if u < 0.9 * b:
        return _lhs_lower_u(u, b)
    return -u + 0.5 * b * math.log((b + u) ** 2 / zeta)


def _lhs_upper_u(u: float, b: float) -> float:
    # U - b arctan(U/b)
    return b * _t_minus_atan(u / b)


def _lhs_lower_u(u: float, b: float) -> float:
    # -U + (b/2) log((b+U)/(b-U)) = b (artanh(U/b) - U/b)
    return b * _atanh_minus_t(u / b)


def rhs_upper(x: float, a: float) -> float:
    """int_x^a sqrt(a^2-s^2)/(1-s^2) ds by adaptive quadrature in t."""
    if x >= a:
        return 0.0
    t0 = math.asin(x / a)
    a2 = a * a

    def f(t):
        c = math.cos(t)
        return a2 * c * c / (1.0 - a2 * math.sin(t) ** 2)

    val, _ = quad(f, t0, math.pi / 2, epsabs=0.0, epsrel=1e-13, limit=200)
    return val


def rhs_lower(x: float, a: float) -> float:
    """int_a^x sqrt(s^2-a^2)/(1-s^2) ds by adaptive quadrature in u."""
    if x <= a:
        return 0.0
    if x >= 1.0:
        return math.inf
    u1 = math.acosh(x / a)
    a2 = a * a
    b2 = (1.0 - a) * (1.0 + a)

    def f(u):
        sh = math.sinh(u)
        return a2 * sh * sh / (b2 - a2 * sh * sh)

    val, _ = quad(f, 0.0, u1, epsabs=0.0, epsrel=1e-13, limit=200)
    return val


def rhs_upper_closed(x: float, a: float, b: float) -> float:
    """Closed form of rhs_upper: pi/2 (1-b) - t + b arctan(b tan t), t = asin(x/a)."""
    if x >= a:
        return 0.0
    t = math.asin(x / a)
    return 0.5 * math.pi - t - b * (0.5 * math.pi - math.atan2(b * math.sin(t), math.cos(t)))


def rhs_lower_closed(x: float, a: float, b: float) -> float:
    """Closed form of rhs_lower: b artanh(tanh(u)/b) - u, cosh u = x/a."""
    if x <= a:
        return 0.0
    u = math.acosh(x / a)
    th = math.sqrt((x - a) * (x + a)) / x
    return b * math.atanh(th / b) - u


def _safe_newton(g, dg, lo: float, hi: float, t0: float, tol: float):
    """Root of increasing g on [lo, hi]; Newton steps, bisection fallback."""
    t = min(max(t0, lo), hi)
    gt = g(t)
    for _ in range(MAX_ITER):
        if abs(gt) <= tol:
            return t, gt
        if gt > 0:
            hi = t
        else:
            lo = t
        d = dg(t)
        nt = t - gt / d if d > 0 else math.nan
        if not lo < nt < hi:
            nt = 0.5 * (lo + hi)
        if nt == t or hi - lo <= 4e-16 * abs(t) + 1e-300:
            return t, gt
        t = nt
        gt = g(t)
    raise ConvergenceError(f"no convergence after {MAX_ITER} iterations", residual=abs(gt))


def zeta_solve(p: IndexPair, x: float, eps: float = 0.5) -> ZetaSolution:
    require_I(p)
    if p.m.twice == 0:
        raise DegenerateIndexError("m = 0 gives b = 0; zeta is degenerate")
    if float(p.m) > eps * float(p.ell):
        raise WrongRegimeError(f"{p}: m > eps*l")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x must lie in [0, 1], got {x}")
    td = transition_points(p)
    a, b = td.a, td.b
    b2 = b * b
    if x == a:
        return ZetaSolution(p, x, b2, 0.0, 0.0)
    if x < a:
        G = rhs_upper(x, a)
        tol = 1e-14 * G
        g = lambda u: _lhs_upper_u(u, b) - G
        dg = lambda u: u * u / (b2 + u * u)
        guess = (3.0 * b2 * G) ** (1.0 / 3.0) if G < b else G + 0.5 * math.pi * b
        u, gu = _safe_newton(g, dg, 0.0, G + math.pi * b + 1.0, guess, tol)
        return ZetaSolution(p, x, b2 + u * u, abs(gu), u * u)
    if x == 1.0:
        return ZetaSolution(p, x, 0.0, 0.0, -b2)
    G = rhs_lower(x, a)
    tol = 1e-14 * G
    # F_lo at U = sqrt(3)/2 b, i.e. zeta = b^2/4
    if G <= _lhs_lower_u(0.5 * math.sqrt(3.0) * b, b):
        # near the transition point: variable U in [0, b), F_lo = b (artanh(U/b) - U/b)
        g = lambda u: _lhs_lower_u(u, b) - G
        dg = lambda u: (u / b) ** 2 / ((1.0 - u / b) * (1.0 + u / b))
        guess = min((3.0 * b2 * G) ** (1.0 / 3.0), 0.9 * b)
        u, gu = _safe_newton(g, dg, 0.0, 0.5 * math.sqrt(3.0) * b, guess, tol)
        return ZetaSolution(p, x, (b - u) * (b + u), abs(gu), -u * u)

    # far from it: variable eta = log(zeta); F_lo decreases in eta with dF/deta = -U/2
    def F(eta):
        z = math.exp(eta)
        u = math.sqrt(max(b2 - z, 0.0))
        return -u + b * math.log(b + u) - 0.5 * b * eta

    g = lambda eta: G - F(eta)
    dg = lambda eta: 0.5 * math.sqrt(max(b2 - math.exp(eta), 0.0))
    hi = 2.0 * math.log(b) - math.log(4.0)
    lo = hi - 2.0 * (G / b + 2.0) - 10.0
    while g(lo) > 0:
        lo -= 2.0 * (lo - hi)
    guess = 2.0 * (b * math.log(2 * b) - b - G) / b
    eta, ge = _safe_newton(g, dg, lo, hi, guess, tol)
    z = math.exp(eta)
    return ZetaSolution(p, x, z, abs(ge), z - b2)


def claim_ratio(p: IndexPair, x: float, eps: float = 0.5) -> Optional[float]:
    """(zeta(x) - b^2) / (y^2 - b^2); None at the removable point y = b."""
    td = transition_points(p)
    y2 = (1.0 - x) * (1.0 + x)
    y = math.sqrt(y2)
    b = td.b
    if not (b / 2 <= y * (1 + 1e-12) and y <= b / math.sqrt(eps) * (1 + 1e-12)):
        raise DomainError(f"y = {y} outside [b/2, b/sqrt(eps)]")
    denom = (td.a - x) * (td.a + x)
    if denom == 0.0:
        return None
    sol = zeta_solve(p, x, eps)
    return sol.offset / denom


def L_values(p: IndexPair, x) -> np.ndarray:
    """L(x) = (1-x^2)^{1/2} Y_{l,m}(x)."""
    return eval_Y_array(p, np.asarray(x, dtype=float), power_shift=0.5)


def L_value(p: IndexPair, x: float) -> float:
    return float(L_values(p, np.array([x]))[0])


def _second_difference(p: IndexPair, x: float, h: float) -> tuple[float, float]:
    v = L_values(p, np.array([x - h, x, x + h]))
    return (v[2] - 2.0 * v[1] + v[0]) / (h * h), v[1]


def ode_residual(p: IndexPair, x: float, h: float, richardson: bool = True) -> float:
    """Scaled defect |L'' - Q L| / (|Q L| + h^2 max(1,|L|) l^4), with L''
    from central differences (Richardson-combined over h and h/2)."""
    require_I(p)
    if not 1e-6 <= h <= 1e-3:
        raise DomainError(f"h must lie in [1e-6, 1e-3], got {h}")
    if not abs(x) + 2 * h < 1.0:
        raise DomainError(f"need |x| + 2h < 1, got x={x}, h={h}")
    d_h, L = _second_difference(p, x, h)
    if richardson:
        d_h2, _ = _second_difference(p, x, h / 2)
        d2 = (4.0 * d_h2 - d_h) / 3.0
    else:
        d2 = d_h
    QL = q_value(p, x) * L
    floor = h * h * max(1.0, abs(L)) * float(p.ell) ** 4
    return abs(d2 - QL) / (abs(QL) + floor)


def default_step(p: IndexPair, x: float) -> float:
    h = min(0.01 / float(p.ell), 0.05 * (1.0 - abs(x)))
    return min(max(h, 1e-6), 1e-3)


def sign_check(p: IndexPair, x: float, h: float = 1e-6) -> Optional[bool]:
    """True iff L(x) L'(x) < 0; None when |L| or |L'| is below 10 h."""
    require_I(p)
    xbar = transition_points(p).xbar
    if xbar is None or not xbar < x < 1.0:
        raise DomainError(f"need xbar < x < 1 (xbar={xbar}, x={x})")
    if x + h >= 1.0:
        return None
    v = L_values(p, np.array([x - h, x, x + h]))
    L = v[1]
    dL = (v[2] - v[0]) / (2 * h)
    if abs(L) <= 10 * h or abs(dL) <= 10 * h:
        return None
    return bool(L * dL < 0)


def sqrt_q_integral(p: IndexPair, x0: float, x1: float) -> float:
    def f(u):
        return math.sqrt(max(q_value(p, u), 0.0))

    val, _ = quad(f, x0, x1, epsabs=1e-13, epsrel=1e-12, limit=200)
    return val


def titchmarsh_check(p: IndexPair, x_star: float, x: float) -> tuple[float, float]:
    """(|L(x)|, |L(x_*)| exp(-int_{x_*}^x Q^{1/2}))."""
    require_I(p)
    xbar = transition_points(p).xbar
    if xbar is None:
        raise DomainError(f"xbar undefined for m = {p.m}")
    if not (xbar < x_star <= x < 1.0):
        raise DomainError(f"need xbar < x_* <= x < 1 (xbar={xbar}, x_*={x_star}, x={x})")
    v = np.abs(L_values(p, np.array([x_star, x])))
    if x == x_star:
        return float(v[1]), float(v[0])
    return float(v[1]), float(v[0] * math.exp(-sqrt_q_integral(p, x_star, x)))


def ode_residual_array(p: IndexPair, x, h) -> np.ndarray:
    """Vectorised ode_residual (Richardson-combined) over arrays x, h."""
    require_I(p)
    x = np.asarray(x, dtype=float)
    h = np.broadcast_to(np.asarray(h, dtype=float), x.shape)
    if np.any((h < 1e-6) | (h > 1e-3)):
        raise DomainError("h must lie in [1e-6, 1e-3]")
    if np.any(np.abs(x) + 2 * h >= 1.0):
        raise DomainError("need |x| + 2h < 1")
    n = x.size
    pts = np.concatenate([x - h, x - h / 2, x, x + h / 2, x + h])
    v = L_values(p, pts).reshape(5, n)
    d_h = (v[4] - 2.0 * v[2] + v[0]) / (h * h)
    d_h2 = (v[3] - 2.0 * v[2] + v[1]) / (h * h / 4)
    d2 = (4.0 * d_h2 - d_h) / 3.0
    ell, m = float(p.ell), float(p.m)
    omx2 = (1.0 - x) * (1.0 + x)
    q = (ell * ell * x * x - (ell * ell - m * m) - (3.0 + x * x) / 4.0) / (omx2 * omx2)
    QL = q * v[2]
    floor = h * h * np.maximum(1.0, np.abs(v[2])) * ell ** 4
    return np.abs(d2 - QL) / (np.abs(QL) + floor)


def sign_check_array(p: IndexPair, x, h: float = 1e-6) -> np.ndarray:
    """sign_check over an array: 1 (L L' < 0), 0 (violated), -1 (skipped)."""
    require_I(p)
    xbar = transition_points(p).xbar
    x = np.asarray(x, dtype=float)
    if xbar is None or np.any((x <= xbar) | (x >= 1.0)):
        raise DomainError(f"need xbar < x < 1 (xbar={xbar})")
    ok = x + h < 1.0
    xs = np.where(ok, x, 0.0)
    v = L_values(p, np.concatenate([xs - h, xs, xs + h])).reshape(3, x.size)
    L = v[1]
    dL = (v[2] - v[0]) / (2 * h)
    out = np.where(L * dL < 0, 1, 0)
    skip = ~ok | (np.abs(L) <= 10 * h) | (np.abs(dL) <= 10 * h)
    return np.where(skip, -1, out).astype(np.int8)
