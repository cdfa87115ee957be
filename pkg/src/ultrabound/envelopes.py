"""Structural right-hand sides of the pointwise bounds.

Every function returns the bare envelope without its implicit constant;
the harness measures constants as sup |Y| / envelope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidIndexError, WrongRegimeError
from .halfint import IndexPair, harmonic_dim, require_I, require_I_d, sphere_measure
import numpy as np

from .ultra import PointLike, as_point

E = math.e


@dataclass(frozen=True)
class RegimeParams:
    epsilon: float = 0.5
    c: float = 0.05
    K: float = 2.0

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not 0.0 < self.c < 1.0:
            raise ValueError(f"c must lie in (0, 1), got {self.c}")
        if not self.K > 1.0:
            raise ValueError(f"K must be > 1, got {self.K}")


DEFAULT_PARAMS = RegimeParams()


def is_hermite(p: IndexPair, epsilon: float) -> bool:
    return float(p.m) >= epsilon * float(p.ell)


def is_bessel(p: IndexPair, epsilon: float) -> bool:
    return float(p.m) <= epsilon * float(p.ell)


def _a2(p: IndexPair) -> float:
    te, tm = p.ell.twice, p.m.twice
    return (te - tm) * (te + tm) / (te * te)


def _b(p: IndexPair) -> float:
    return p.m.twice / p.ell.twice


def _exp_or_zero(log_v: float) -> float:
    return 0.0 if log_v == -math.inf else math.exp(log_v)


def _log_pow(base: float, power: float) -> float:
    """log(base^power) with 0^0 = 1 and 0^positive = 0."""
    if power == 0.0:
        return 0.0
    if base == 0.0:
        return -math.inf if power > 0 else math.inf
    return power * math.log(base)


def hermite_main(p: IndexPair, pt: PointLike) -> float:
    """(1/l + |x^2 - a^2|)^{-1/4}."""
    pt = as_point(pt)
    ell = float(p.ell)
    return (1.0 / ell + abs(pt.x * pt.x - _a2(p))) ** -0.25


def hermite_decay(d: int, p: IndexPair, pt: PointLike, rp: RegimeParams = DEFAULT_PARAMS,
                  form: str = "corollary") -> float:
    """Decay majorant beyond K a.

    form="corollary": |x|^{-1/2} (1-x^2)^{(c eps l - (d-2)/2)_+ / 2}
    form="theorem":   |x|^{-1/2} (1-x^2)^{(c l - (d-2)/4)_+}
    """
    pt = as_point(pt)
    ell = float(p.ell)
    if form == "corollary":
        power = max(rp.c * rp.epsilon * ell - (d - 2) / 2, 0.0) / 2
    elif form == "theorem":
        power = max(rp.c * ell - (d - 2) / 4, 0.0)
    else:
        raise ValueError(f"unknown decay form {form!r}")
    ax = abs(pt.x)
    if ax == 0.0:
        return math.inf
    return _exp_or_zero(-0.5 * math.log(ax) + _log_pow(pt.one_minus_x2, power))


def hermite_envelope(d: int, p: IndexPair, pt: PointLike, rp: RegimeParams = DEFAULT_PARAMS) -> float:
    """Envelope for m >= eps*l; the decay branch applies for |x| >= K a."""
    require_I_d(p, d)
    if not is_hermite(p, rp.epsilon):
        raise WrongRegimeError(f"{p}: m < eps*l, not in the Hermite regime")
    pt = as_point(pt)
    main = hermite_main(p, pt)
    if abs(pt.x) >= rp.K * math.sqrt(_a2(p)):
        return min(main, hermite_decay(d, p, pt, rp))
    return main


def bessel_envelope(d: int, p: IndexPair, pt: PointLike, rp: RegimeParams = DEFAULT_PARAMS) -> float:
    """Envelope for m <= eps*l.

    y^{-(d-2)/2} (l^{-2}(1+m)^{4/3} + |y^2-b^2|)^{-1/4}, capped by
    l^{(d-1)/2} 2^{-m} where y <= b/(2e). Returns +inf at y = 0 for d > 2
    unless the cap applies.
    """
    require_I_d(p, d)
    if not is_bessel(p, rp.epsilon):
        raise WrongRegimeError(f"{p}: m > eps*l, not in the Bessel regime")
    pt = as_point(pt)
    ell, m = float(p.ell), float(p.m)
    b = _b(p)
    y = pt.y
    log_main = (_log_pow(y, -(d - 2) / 2)
                - 0.25 * math.log((1 + m) ** (4.0 / 3.0) / (ell * ell) + abs(y * y - b * b)))
    if y <= b / (2 * E):
        log_cap = 0.5 * (d - 1) * math.log(ell) - m * math.log(2.0)
        log_main = min(log_main, log_cap)
    return math.inf if log_main == math.inf else _exp_or_zero(log_main)


def exp_small_y_bound(p: IndexPair, pt: PointLike) -> float:
    """b^{-(m+1/2)} (y e)^m for m > 0.

    For m = 0 the formula degenerates (b = 0); the universal bound is
    returned instead.
    """
    require_I(p)
    pt = as_point(pt)
    m = float(p.m)
    if m == 0.0:
        return universal_bound(p, pt)
    b = _b(p)
    if pt.y == 0.0:
        return 0.0
    return math.exp(-(m + 0.5) * math.log(b) + m * (math.log(pt.y) + 1.0))


def _log_binom(n: float, k: float) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def universal_first(p: IndexPair, pt: PointLike) -> float:
    """sqrt((1-x^2)^m (l / sqrt(m+1)) binom(l - 1/2 + m, 2m))."""
    pt = as_point(pt)
    ell, m = float(p.ell), float(p.m)
    log_sq = (_log_pow(pt.one_minus_x2, m) + math.log(ell) - 0.5 * math.log(m + 1)
              + _log_binom(ell - 0.5 + m, 2 * m))
    return _exp_or_zero(0.5 * log_sq)


def universal_second(p: IndexPair, pt: PointLike) -> float:
    """|Y| majorant from the smallest admissible dimension.

    sqrt(l) for integer m, (1-x^2)^{1/4} l / sqrt(m) for half-integer m.
    """
    pt = as_point(pt)
    ell, m = float(p.ell), float(p.m)
    if p.m.is_integer():
        return math.sqrt(ell)
    return _exp_or_zero(_log_pow(pt.one_minus_x2, 0.25) + math.log(ell) - 0.5 * math.log(m))


def universal_second_literal(p: IndexPair, pt: PointLike) -> float:
    """The second universal display read literally as a bound on Y^2,
    returned as a |Y| majorant: l^{1/4}, or ((1-x^2)^{1/2} l / m^{1/2})^{1/2}.

    Kept for measurement only: its empirical constant grows with l.
    """
    pt = as_point(pt)
    ell, m = float(p.ell), float(p.m)
    if p.m.is_integer():
        return ell ** 0.25
    return _exp_or_zero(0.5 * (_log_pow(pt.one_minus_x2, 0.5) + math.log(ell) - 0.5 * math.log(m)))


def universal_bound(p: IndexPair, pt: PointLike) -> float:
    """Minimum of the two universal |Y| majorants."""
    require_I(p)
    return min(universal_first(p, pt), universal_second(p, pt))


def dimension_bound(d: int, p: IndexPair, pt: PointLike) -> float:
    """Exact |Y| bound with constant one, valid for every (l,m) in I_d:

    Y^2 <= (1-x^2)^{(d-2)/2} dim H^l(S^d) / dim H^m(S^{d-1}) * sigma_{d-1}/sigma_d.
    """
    require_I_d(p, d)
    pt = as_point(pt)
    log_sq = (_log_pow(pt.one_minus_x2, (d - 2) / 2)
              + math.log(harmonic_dim(d, p.ell)) - math.log(harmonic_dim(d - 1, p.m))
              + math.log(sphere_measure(d - 1)) - math.log(sphere_measure(d)))
    return _exp_or_zero(0.5 * log_sq)


def dims_for(p: IndexPair) -> tuple[int, int]:
    """Smallest and largest d with p in I_d."""
    require_I(p)
    d_min = 2 if p.m.is_integer() else 3
    d_max = p.m.twice + 2
    if d_max < d_min:
        raise InvalidIndexError(f"{p} lies in no I_d")
    return d_min, d_max


# Vectorised log-envelopes over an x-array, used by sweeps. Each returns
# log(envelope) with -inf for a zero envelope and +inf for a pole.

def _log_pow_array(base: np.ndarray, power: float) -> np.ndarray:
    if power == 0.0:
        return np.zeros_like(base)
    with np.errstate(divide="ignore"):
        return power * np.log(base)


def log_hermite_main_array(p: IndexPair, x: np.ndarray) -> np.ndarray:
    return -0.25 * np.log(1.0 / float(p.ell) + np.abs(x * x - _a2(p)))


def log_hermite_envelope_array(d: int, p: IndexPair, x: np.ndarray,
                               rp: RegimeParams = DEFAULT_PARAMS) -> np.ndarray:
    out = log_hermite_main_array(p, x)
    ax = np.abs(x)
    branch = ax >= rp.K * math.sqrt(_a2(p))
    if np.any(branch):
        power = max(rp.c * rp.epsilon * float(p.ell) - (d - 2) / 2, 0.0) / 2
        xb = ax[branch]
        decay = -0.5 * np.log(xb) + _log_pow_array((1.0 - xb) * (1.0 + xb), power)
        out[branch] = np.minimum(out[branch], decay)
    return out


def log_bessel_envelope_array(d: int, p: IndexPair, x: np.ndarray,
                              rp: RegimeParams = DEFAULT_PARAMS) -> np.ndarray:
    ell, m = float(p.ell), float(p.m)
    b = _b(p)
    y2 = (1.0 - x) * (1.0 + x)
    y = np.sqrt(y2)
    out = (_log_pow_array(y, -(d - 2) / 2)
           - 0.25 * np.log((1 + m) ** (4.0 / 3.0) / (ell * ell) + np.abs(y2 - b * b)))
    small = y <= b / (2 * E)
    if np.any(small):
        cap = 0.5 * (d - 1) * math.log(ell) - m * math.log(2.0)
        out[small] = np.minimum(out[small], cap)
    return out


def log_exp_small_y_array(p: IndexPair, x: np.ndarray) -> np.ndarray:
    m = float(p.m)
    if m == 0.0:
        return log_universal_array(p, x)
    y = np.sqrt((1.0 - x) * (1.0 + x))
    with np.errstate(divide="ignore"):
        return -(m + 0.5) * math.log(_b(p)) + m * (np.log(y) + 1.0)


def log_universal_array(p: IndexPair, x: np.ndarray, literal: bool = False) -> np.ndarray:
    ell, m = float(p.ell), float(p.m)
    omx2 = (1.0 - x) * (1.0 + x)
    first = 0.5 * (_log_pow_array(omx2, m) + math.log(ell) - 0.5 * math.log(m + 1)
                   + _log_binom(ell - 0.5 + m, 2 * m))
    if literal:
        if p.m.is_integer():
            second = np.full_like(x, 0.25 * math.log(ell))
        else:
            second = 0.5 * (_log_pow_array(omx2, 0.5) + math.log(ell) - 0.5 * math.log(m))
        return second
    if p.m.is_integer():
        second = np.full_like(x, 0.5 * math.log(ell))
    else:
        second = _log_pow_array(omx2, 0.25) + math.log(ell) - 0.5 * math.log(m)
    return np.minimum(first, second)
