"""Overflow-safe evaluation of P_j^{(m,m)}, c_{lm}, Y_{l,m} and X~^d_{l,m}.

Two independent routes are provided:

* the scalar route (`jacobi_symmetric`, `eval_Y`, `eval_X`) runs the
  unnormalised Jacobi recurrence in degree and assembles
  c_{lm} (1-x^2)^{m/2} P_j^{(m,m)}(x) in log space;
* the table route (`y_table`) runs the orthonormal three-term recurrence
  in ell at fixed m, producing every Y_{l,m}, l <= ell_max, on a whole
  x-grid at once. Sweeps use it; tests cross-check it against the scalar
  route.

For reference, Y_{l,m} = sqrt(l Gamma(l+m+1/2)/Gamma(l-m+1/2)) P^{-m}_{l-1/2}
with P^{-m}_nu the Ferrers function. That form is not implemented.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError, InvalidIndexError, ScaledUnderflowError
from .halfint import HalfInt, IndexPair, require_I, require_I_d

# renormalisation thresholds for recurrences, e^{+-230}
RENORM_HI = math.exp(230.0)
RENORM_LO = math.exp(-230.0)
_LOG_RENORM = 230.0


@dataclass(frozen=True)
class ScaledReal:
    """sign * exp(log_mag); log_mag is ignored when sign == 0."""

    sign: int
    log_mag: float = 0.0

    @classmethod
    def from_float(cls, v: float) -> "ScaledReal":
        if v == 0.0:
            return cls(0, 0.0)
        return cls(1 if v > 0 else -1, math.log(abs(v)))

    @classmethod
    def zero(cls) -> "ScaledReal":
        return cls(0, 0.0)

    def __mul__(self, other: "ScaledReal") -> "ScaledReal":
        if not isinstance(other, ScaledReal):
            other = ScaledReal.from_float(float(other))
        s = self.sign * other.sign
        if s == 0:
            return ScaledReal.zero()
        return ScaledReal(s, self.log_mag + other.log_mag)

    __rmul__ = __mul__

    def __neg__(self) -> "ScaledReal":
        return ScaledReal(-self.sign, self.log_mag)

    def __add__(self, other: "ScaledReal") -> "ScaledReal":
        if not isinstance(other, ScaledReal):
            other = ScaledReal.from_float(float(other))
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        big, small = (self, other) if self.log_mag >= other.log_mag else (other, self)
        # big * (1 + sign_ratio * exp(small - big))
        t = 1.0 + big.sign * small.sign * math.exp(small.log_mag - big.log_mag)
        if t == 0.0:
            return ScaledReal.zero()
        return ScaledReal(big.sign * (1 if t > 0 else -1), big.log_mag + math.log(abs(t)))

    def __sub__(self, other: "ScaledReal") -> "ScaledReal":
        return self + (-other)

    def to_float(self, flush_underflow: bool = False) -> float:
        if self.sign == 0:
            return 0.0
        if self.log_mag > 709.0:
            raise OverflowError(f"exp({self.log_mag}) overflows a double")
        if self.log_mag < -700.0:
            if not flush_underflow:
                raise ScaledUnderflowError(f"exp({self.log_mag}) underflows a double")
            if self.log_mag < -745.2:
                return 0.0
        return self.sign * math.exp(self.log_mag)

    def __float__(self) -> float:
        return self.to_float(flush_underflow=True)


@dataclass(frozen=True)
class EvalPoint:
    x: float
    y: float

    @classmethod
    def from_x(cls, x: float) -> "EvalPoint":
        x = float(x)
        if not -1.0 <= x <= 1.0:
            raise DomainError(f"x must lie in [-1, 1], got {x}")
        return cls(x, math.sqrt((1.0 - x) * (1.0 + x)))

    @classmethod
    def from_y(cls, y: float, sign: int = 1) -> "EvalPoint":
        y = float(y)
        if not 0.0 <= y <= 1.0:
            raise DomainError(f"y must lie in [0, 1], got {y}")
        x = math.sqrt((1.0 - y) * (1.0 + y))
        return cls(x if sign >= 0 else -x, y)

    @property
    def one_minus_x2(self) -> float:
        if abs(self.x) > 0.7:
            return self.y * self.y
        return (1.0 - self.x) * (1.0 + self.x)


PointLike = Union[EvalPoint, float]


def as_point(pt: PointLike) -> EvalPoint:
    return pt if isinstance(pt, EvalPoint) else EvalPoint.from_x(pt)


def _omx2_array(x: np.ndarray) -> np.ndarray:
    return (1.0 - x) * (1.0 + x)


def jacobi_symmetric(j: int, alpha, x: float) -> ScaledReal:
    """P_j^{(alpha,alpha)}(x) by forward recurrence with renormalisation.

    n(n+2a) P_n = (n+a)(2n+2a-1) x P_{n-1} - (n+a)(n+a-1) P_{n-2}.
    """
    if j < 0:
        raise InvalidIndexError(f"degree must be >= 0, got {j}")
    a = float(alpha)
    if a < 0:
        raise InvalidIndexError(f"alpha must be >= 0, got {alpha}")
    x = float(x)
    if abs(x) > 1.0:
        raise DomainError(f"|x| must be <= 1, got {x}")
    prev, cur = 0.0, 1.0
    offset = 0.0
    for n in range(1, j + 1):
        nxt = ((n + a) * (2 * n + 2 * a - 1) * x * cur - (n + a) * (n + a - 1) * prev) / (n * (n + 2 * a))
        prev, cur = cur, nxt
        big = max(abs(prev), abs(cur))
        if big > RENORM_HI:
            prev *= RENORM_LO
            cur *= RENORM_LO
            offset += _LOG_RENORM
        elif 0.0 < big < RENORM_LO:
            prev *= RENORM_HI
            cur *= RENORM_HI
            offset -= _LOG_RENORM
    if cur == 0.0:
        return ScaledReal.zero()
    return ScaledReal(1 if cur > 0 else -1, math.log(abs(cur)) + offset)


def log_norm_const(p: IndexPair) -> float:
    require_I(p)
    ell, m = float(p.ell), float(p.m)
    return (0.5 * (math.log(ell) + math.lgamma(ell - m + 0.5) + math.lgamma(ell + m + 0.5))
            - m * math.log(2.0) - math.lgamma(ell + 0.5))


def norm_const(p: IndexPair) -> ScaledReal:
    """c_{lm} = sqrt(l Gamma(l-m+1/2) Gamma(l+m+1/2)) / (2^m Gamma(l+1/2))."""
    return ScaledReal(1, log_norm_const(p))


def _log_weight(omx2: float, power: float):
    """log of (1-x^2)^power, or None when the factor is exactly zero."""
    if power == 0.0:
        return 0.0
    if omx2 == 0.0:
        if power > 0:
            return None
        raise ZeroDivisionError("pole at |x| = 1")
    return power * math.log(omx2)


def eval_Y_scaled(p: IndexPair, pt: PointLike) -> ScaledReal:
    require_I(p)
    pt = as_point(pt)
    m = float(p.m)
    lw = _log_weight(pt.one_minus_x2, m / 2)
    if lw is None:
        return ScaledReal.zero()
    poly = jacobi_symmetric(p.degree, p.m, pt.x)
    return poly * ScaledReal(1, log_norm_const(p) + lw)


def eval_Y(p: IndexPair, pt: PointLike) -> float:
    """Y_{l,m}(x) = c_{lm} (1-x^2)^{m/2} P_{l-m-1/2}^{(m,m)}(x)."""
    return eval_Y_scaled(p, pt).to_float(flush_underflow=True)


def eval_X(d: int, p: IndexPair, pt: PointLike) -> float:
    """X~^d_{l,m}(x) = (1-x^2)^{-(d-2)/4} Y_{l,m}(x).

    For (l,m) in I_d the combined exponent m/2 - (d-2)/4 is >= 0, so the
    value is finite on [-1, 1]; it vanishes at x = +-1 iff m > (d-2)/2.
    """
    require_I_d(p, d)
    pt = as_point(pt)
    power = float(p.m) / 2 - (d - 2) / 4
    lw = _log_weight(pt.one_minus_x2, power)
    if lw is None:
        return 0.0
    poly = jacobi_symmetric(p.degree, p.m, pt.x)
    return (poly * ScaledReal(1, log_norm_const(p) + lw)).to_float(flush_underflow=True)


def _finish(mant: np.ndarray, log_scale: np.ndarray) -> np.ndarray:
    with np.errstate(under="ignore", over="raise"):
        return mant * np.exp(log_scale)


def jacobi_symmetric_array(j: int, alpha, x: np.ndarray):
    """Vector form of `jacobi_symmetric`; returns (mantissa, log_scale)."""
    a = float(alpha)
    x = np.asarray(x, dtype=float)
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    offset = np.zeros_like(x)
    for n in range(1, j + 1):
        nxt = ((n + a) * (2 * n + 2 * a - 1) * x * cur - (n + a) * (n + a - 1) * prev) / (n * (n + 2 * a))
        prev, cur = cur, nxt
        if n % 8 == 0 or n == j:
            big = np.maximum(np.abs(prev), np.abs(cur))
            hi = big > RENORM_HI
            if np.any(hi):
                prev[hi] *= RENORM_LO
                cur[hi] *= RENORM_LO
                offset[hi] += _LOG_RENORM
    return cur, offset


def eval_Y_array(p: IndexPair, x, power_shift: float = 0.0) -> np.ndarray:
    """Y_{l,m} on an array of abscissae (scalar route, vectorised over x).

    `power_shift` is added to the exponent m/2 of (1-x^2); eval_X_array
    uses it for the -(d-2)/4 factor.
    """
    require_I(p)
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0):
        raise DomainError("|x| must be <= 1")
    mant, off = jacobi_symmetric_array(p.degree, p.m, x)
    power = float(p.m) / 2 + power_shift
    omx2 = _omx2_array(x)
    log_s = off + log_norm_const(p)
    if power != 0.0:
        zero = omx2 == 0.0
        if power < 0 and np.any(zero):
            raise ZeroDivisionError("pole at |x| = 1")
        with np.errstate(divide="ignore"):
            lw = power * np.log(np.where(zero, 1.0, omx2))
        log_s = log_s + lw
        mant = np.where(zero, 0.0, mant)
    return _finish(mant, log_s)


def eval_X_array(d: int, p: IndexPair, x) -> np.ndarray:
    require_I_d(p, d)
    return eval_Y_array(p, x, power_shift=-(d - 2) / 4)


def y_table(m, ell_max, x, power_shift: float = 0.0, log: bool = False):
    """Y_{l,m}(x) for l = m+1/2, m+3/2, ..., <= ell_max at fixed m.

    Returns (two_ells, values) with values of shape (len(two_ells),) + x.shape,
    or (two_ells, sign, log_abs) when `log` is set (log_abs = -inf at zeros).
    Uses the orthonormal recurrence

        Y_l = A_l x Y_{l-1} - B_l Y_{l-2},
        A_l = 2 sqrt(l(l-1) / ((l-1/2)^2 - m^2)),
        B_l = sqrt(l((l-3/2)^2 - m^2) / ((l-2)((l-1/2)^2 - m^2))).
    """
    m = HalfInt.of(m)
    top = HalfInt.of(ell_max).twice
    x = np.asarray(x, dtype=float)
    shape = x.shape
    xf = x.reshape(-1)
    two_ells = list(range(m.twice + 1, top + 1, 2))
    out = np.zeros((len(two_ells), xf.size))
    if not two_ells:
        if log:
            return two_ells, out.reshape((0,) + shape), out.reshape((0,) + shape)
        return two_ells, out.reshape((0,) + shape)
    mf = float(m)
    omx2 = _omx2_array(xf)
    zero = omx2 == 0.0
    power = mf / 2 + power_shift
    log_c0 = log_norm_const(IndexPair(HalfInt(m.twice + 1), m))
    with np.errstate(divide="ignore"):
        lw = power * np.log(np.where(zero, 1.0, omx2)) if power != 0 else np.zeros_like(xf)
    if power < 0 and np.any(zero):
        raise ZeroDivisionError("pole at |x| = 1")
    cur = np.where(zero & (power > 0), 0.0, 1.0)
    prev = np.zeros_like(xf)
    log_s = lw + log_c0
    scales = np.empty_like(out)
    out[0] = cur
    scales[0] = log_s
    for j in range(1, len(two_ells)):
        ell = two_ells[j] / 2
        d1 = (ell - 0.5) ** 2 - mf * mf
        A = 2.0 * math.sqrt(ell * (ell - 1) / d1)
        if j == 1:
            nxt = A * xf * cur
        else:
            B = math.sqrt(ell * ((ell - 1.5) ** 2 - mf * mf) / ((ell - 2) * d1))
            nxt = A * xf * cur - B * prev
        prev, cur = cur, nxt
        big = np.abs(cur)
        hi = big > RENORM_HI
        if np.any(hi):
            prev[hi] *= RENORM_LO
            cur[hi] *= RENORM_LO
            log_s = log_s.copy()
            log_s[hi] += _LOG_RENORM
        out[j] = cur
        scales[j] = log_s
    full = (len(two_ells),) + shape
    if log:
        with np.errstate(divide="ignore"):
            log_abs = np.log(np.abs(out)) + scales
        return two_ells, np.sign(out).reshape(full), log_abs.reshape(full)
    return two_ells, _finish(out, scales).reshape(full)
