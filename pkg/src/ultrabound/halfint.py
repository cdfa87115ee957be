"""Exact half-integer indices, the index sets I and I_d, and closed-form
quantities attached to an index pair (transition points, Laplace
eigenvalues, harmonic dimensions, sphere measures).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .errors import (
    DegenerateIndexError,
    DomainError,
    InvalidDimensionError,
    InvalidIndexError,
    UndefinedXbarError,
)

Number = Union[int, float, Fraction, str, "HalfInt"]


@dataclass(frozen=True, order=True)
class HalfInt:
    """A half-integer stored as twice its value."""

    twice: int

    @classmethod
    def of(cls, value: Number) -> "HalfInt":
        if isinstance(value, HalfInt):
            return value
        if isinstance(value, str):
            value = Fraction(value)
        if isinstance(value, float):
            t = value * 2
            if not t.is_integer():
                raise InvalidIndexError(f"{value!r} is not a half-integer")
            return cls(int(t))
        t = Fraction(value) * 2
        if t.denominator != 1:
            raise InvalidIndexError(f"{value!r} is not a half-integer")
        return cls(int(t))

    @property
    def value(self) -> Fraction:
        return Fraction(self.twice, 2)

    def __float__(self) -> float:
        return self.twice / 2

    def __add__(self, other: Number) -> "HalfInt":
        return HalfInt(self.twice + HalfInt.of(other).twice)

    __radd__ = __add__

    def __sub__(self, other: Number) -> "HalfInt":
        return HalfInt(self.twice - HalfInt.of(other).twice)

    def __rsub__(self, other: Number) -> "HalfInt":
        return HalfInt(HalfInt.of(other).twice - self.twice)

    def __neg__(self) -> "HalfInt":
        return HalfInt(-self.twice)

    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    def in_N_k(self, k: int) -> bool:
        """Membership in N + (k-1)/2."""
        shifted = self.twice - (k - 1)
        return shifted >= 0 and shifted % 2 == 0

    def __str__(self) -> str:
        if self.twice % 2 == 0:
            return str(self.twice // 2)
        return f"{self.twice}/2"

    def __repr__(self) -> str:
        return f"HalfInt({self})"


@dataclass(frozen=True)
class TransitionData:
    a: float
    b: float
    # None when m <= 1
    xbar: Optional[float]


@dataclass(frozen=True, order=True)
class IndexPair:
    ell: HalfInt
    m: HalfInt

    @classmethod
    def of(cls, ell: Number, m: Number) -> "IndexPair":
        return cls(HalfInt.of(ell), HalfInt.of(m))

    @classmethod
    def from_twice(cls, two_ell: int, two_m: int) -> "IndexPair":
        return cls(HalfInt(two_ell), HalfInt(two_m))

    @property
    def degree(self) -> int:
        """j = ell - m - 1/2; only meaningful for pairs in I."""
        return (self.ell.twice - self.m.twice - 1) // 2

    def in_I(self) -> bool:
        diff = self.ell.twice - self.m.twice
        return self.m.twice >= 0 and diff >= 1 and diff % 2 == 1

    def in_I_d(self, d: int) -> bool:
        return self.in_I() and self.ell.in_N_k(d) and self.m.in_N_k(d - 1)

    def transition(self) -> TransitionData:
        return transition_points(self)

    def __str__(self) -> str:
        return f"({self.ell}, {self.m})"


def require_I(p: IndexPair) -> None:
    if not p.in_I():
        raise InvalidIndexError(f"{p} is not in I")


def require_I_d(p: IndexPair, d: int) -> None:
    if d < 2:
        raise InvalidDimensionError(f"d must be >= 2, got {d}")
    if not p.in_I_d(d):
        raise InvalidIndexError(f"{p} is not in I_{d}")


def enumerate_indices(d: int, ell_max: Number) -> list[IndexPair]:
    """All pairs of I_d with ell <= ell_max, sorted by (ell, m)."""
    if d < 2:
        raise InvalidDimensionError(f"d must be >= 2, got {d}")
    top = HalfInt.of(ell_max).twice
    out = []
    # ell in N + (d-1)/2, m in N + (d-2)/2, m <= ell - 1/2
    for two_ell in range(d - 1, top + 1, 2):
        for two_m in range(d - 2, two_ell, 2):
            out.append(IndexPair.from_twice(two_ell, two_m))
    return out


def enumerate_I(ell_max: Number, m_max: Optional[Number] = None) -> list[IndexPair]:
    """All pairs of I (no dimension constraint) with ell <= ell_max."""
    top = HalfInt.of(ell_max).twice
    mtop = top if m_max is None else HalfInt.of(m_max).twice
    out = []
    for two_ell in range(1, top + 1):
        for two_m in range(two_ell - 1, -1, -2):
            if two_m <= mtop:
                out.append(IndexPair.from_twice(two_ell, two_m))
    out.sort()
    return out


def transition_points(p: IndexPair) -> TransitionData:
    """Transition geometry a, b and the ODE turning point xbar.

    Defined for every ell != 0 with 0 <= m <= ell in N/2; xbar is only
    reported for m > 1.
    """
    if p.ell.twice == 0:
        raise DegenerateIndexError("ell = 0 has no transition points")
    if p.m.twice < 0 or p.m.twice > p.ell.twice:
        raise InvalidIndexError(f"{p}: need 0 <= m <= ell")
    te, tm = p.ell.twice, p.m.twice
    b = tm / te
    a = math.sqrt((te - tm) * (te + tm)) / te
    xbar = None
    if tm > 2:
        # (4 ell^2 - 4 m^2 + 3) / (4 ell^2 - 1), exact integer numerator and denominator
        xbar = math.sqrt((te * te - tm * tm + 3) / (te * te - 1))
    return TransitionData(a=a, b=b, xbar=xbar)


def q_value(p: IndexPair, x: float) -> float:
    """Q_{l,m}(x) in the form valid for every pair (no xbar needed)."""
    ell = float(p.ell)
    m = float(p.m)
    omx2 = (1.0 - x) * (1.0 + x)
    num = ell * ell * x * x - (ell * ell - m * m) - (3.0 + x * x) / 4.0
    return num / (omx2 * omx2)


def q_factor(p: IndexPair, x: float) -> float:
    """Q(x) = (ell^2 - 1/4)(x^2 - xbar^2)/(1 - x^2)^2 for m > 1."""
    if not abs(x) < 1.0:
        raise DomainError(f"|x| must be < 1, got {x}")
    td = transition_points(p)
    if td.xbar is None:
        raise UndefinedXbarError(f"xbar undefined for m = {p.m} <= 1")
    ell = float(p.ell)
    omx2 = (1.0 - x) * (1.0 + x)
    # x^2 - xbar^2 with xbar^2 as an exact ratio keeps Q(xbar) == 0
    te, tm = p.ell.twice, p.m.twice
    xb2 = (te * te - tm * tm + 3) / (te * te - 1)
    return (ell * ell - 0.25) * (x * x - xb2) / (omx2 * omx2)


def laplace_eigenvalue(d: int, ell: Number) -> float:
    ell = HalfInt.of(ell)
    if d < 1 or not ell.in_N_k(d):
        raise InvalidIndexError(f"ell = {ell} is not in N_{d}")
    v = ell.value
    s = Fraction(d - 1, 2)
    return float((v + s) * (v - s))


def harmonic_dim(d: int, ell: Number) -> int:
    """Dimension of the degree ell' = ell - (d-1)/2 spherical harmonics on S^d."""
    ell = HalfInt.of(ell)
    if d < 1 or not ell.in_N_k(d):
        raise InvalidIndexError(f"ell = {ell} is not in N_{d}")
    lp = (ell.twice - (d - 1)) // 2
    second = math.comb(lp + d - 2, lp - 2) if lp >= 2 else 0
    return math.comb(lp + d, lp) - second


def sphere_measure(d: int) -> float:
    """Surface measure of the unit sphere S^d in R^{d+1}."""
    if d < 1:
        raise InvalidDimensionError(f"d must be >= 1, got {d}")
    return math.exp(math.log(d + 1) + 0.5 * (d + 1) * math.log(math.pi)
                    - math.lgamma((d + 3) / 2))
