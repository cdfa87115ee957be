"""Scalar special functions: log-gamma, Bessel J of real order, and
Gauss-Legendre rules.

Bessel J uses the ascending series when z <= max(12, 2 sqrt(nu+1)), where
the term ratio (z/2)^2/(k(nu+k)) never exceeds one, and Miller's backward
recurrence otherwise. The backward sweep runs in steps of one
along the family nu0 + k (nu0 = frac(nu)) and is normalised by the
Neumann sum

    (z/2)^nu0 = sum_k w_k J_{nu0+2k}(z),  w_0 = Gamma(nu0+1),
    w_k = (nu0+2k) Gamma(nu0+k)/k!  (k >= 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, UnsupportedRangeError

NU_MAX = 2000.0
Z_MAX = 5000.0
SERIES_Z = 12.0

_BIG = 1e250
_LOG_BIG = math.log(_BIG)


def log_gamma(x: float) -> float:
    if not x > 0:
        raise DomainError(f"log_gamma needs x > 0, got {x}")
    return math.lgamma(x)


def _check_bessel_args(nu: float, z: float) -> None:
    if nu < 0 or z < 0:
        raise DomainError(f"bessel_j needs nu >= 0 and z >= 0, got nu={nu}, z={z}")
    if nu > NU_MAX or z > Z_MAX:
        raise UnsupportedRangeError(f"(nu={nu}, z={z}) outside nu <= {NU_MAX}, z <= {Z_MAX}")


def _series_region(nu: float, z: float) -> bool:
    return z <= max(SERIES_Z, 2.0 * math.sqrt(nu + 1.0))


def bessel_j_series(nu: float, z: float) -> float:
    """Ascending series sum_k (-1)^k (z/2)^{nu+2k} / (k! Gamma(nu+k+1))."""
    if z == 0.0:
        return 1.0 if nu == 0 else 0.0
    log_lead = nu * math.log(z / 2) - math.lgamma(nu + 1)
    if log_lead < -745.0:
        return 0.0
    q = -(z / 2) ** 2
    term = 1.0
    total = 1.0
    k = 0
    while True:
        k += 1
        term *= q / (k * (nu + k))
        total += term
        if abs(term) < 1e-17 * abs(total) and k > (z / 2):
            break
        if k > 1000:
            break
    return total * math.exp(log_lead)


def _start_order(nu_top: float, z: float) -> int:
    return int(max(nu_top, z) + 15.0 * z ** (1.0 / 3.0) + 40.0)


def bessel_j_family(nu0: float, kmax: int, z) -> np.ndarray:
    """J_{nu0+k}(z) for k = 0..kmax by Miller's algorithm.

    `z` may be an array; the result has shape (kmax+1,) + z.shape. Entries
    whose true magnitude is below the double range come out as 0.
    """
    if not 0.0 <= nu0 < 1.0:
        raise DomainError(f"family base order must lie in [0, 1), got {nu0}")
    z = np.asarray(z, dtype=float)
    shape = z.shape
    zf = z.reshape(-1)
    if np.any(zf < 0):
        raise DomainError("z must be >= 0")
    out = np.zeros((kmax + 1, zf.size))
    pos = zf > 0
    if nu0 == 0.0:
        out[0, ~pos] = 1.0
    if not np.any(pos):
        return out.reshape((kmax + 1,) + shape)
    zp = zf[pos]
    n_start = _start_order(nu0 + kmax, float(zp.max()))

    # running pair (J_{n+1}, J_n) in a per-column scale; log_scale tracks
    # the factor removed so far
    j_next = np.zeros_like(zp)
    j_cur = np.full_like(zp, 1e-300)
    log_scale = np.zeros_like(zp)
    stored = np.zeros((kmax + 1, zp.size))
    stored_log = np.zeros((kmax + 1, zp.size))
    norm_sum = np.zeros_like(zp)
    two_over_z = 2.0 / zp

    def weight(k: int) -> float:
        if k == 0:
            return math.gamma(nu0 + 1.0)
        return math.exp(math.log(nu0 + 2 * k) + math.lgamma(nu0 + k) - math.lgamma(k + 1))

    for n in range(n_start, -1, -1):
        # j_cur holds J_{nu0+n}
        if n <= kmax:
            stored[n] = j_cur
            stored_log[n] = log_scale
        if n % 2 == 0:
            norm_sum += weight(n // 2) * j_cur
        if n == 0:
            break
        j_prev = (nu0 + n) * two_over_z * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        big = np.abs(j_cur) > _BIG
        if np.any(big):
            j_cur[big] /= _BIG
            j_next[big] /= _BIG
            norm_sum[big] /= _BIG
            log_scale[big] += _LOG_BIG

    # (z/2)^nu0 / norm_sum, both in the final scale
    factor = np.power(zp / 2.0, nu0) / norm_sum
    rel = stored_log - log_scale[None, :]
    with np.errstate(under="ignore"):
        vals = stored * np.exp(rel) * factor[None, :]
    out[:, pos] = vals
    return out.reshape((kmax + 1,) + shape)


def bessel_j_miller(nu: float, z: float) -> float:
    nu0 = nu - math.floor(nu)
    k = int(round(nu - nu0))
    return float(bessel_j_family(nu0, k, np.array([z]))[k, 0])


def bessel_j(nu: float, z: float) -> float:
    """J_nu(z) for 0 <= nu <= 2000, 0 <= z <= 5000."""
    _check_bessel_args(nu, z)
    if _series_region(nu, z):
        return bessel_j_series(nu, z)
    return bessel_j_miller(nu, z)


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    order: int

    def integrate(self, f) -> float:
        return float(np.dot(self.weights, f(self.nodes)))


def _legendre_and_derivative(n: int, x: np.ndarray):
    p0 = np.ones_like(x)
    p1 = x.copy()
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    # P_n' = n (x P_n - P_{n-1}) / (x^2 - 1)
    dp = n * (x * p1 - p0) / (x * x - 1.0)
    return p1, dp


def gauss_legendre(n: int) -> QuadratureRule:
    """n-point Gauss-Legendre rule on [-1, 1] via Newton iteration."""
    if not 1 <= n <= 100_000:
        raise UnsupportedRangeError(f"n must be in [1, 1e5], got {n}")
    if n == 1:
        return QuadratureRule(np.array([0.0]), np.array([2.0]), 1)
    half = (n + 1) // 2
    k = np.arange(1, half + 1)
    # Tricomi initial guess, nodes in decreasing order
    theta = np.pi * (4 * k - 1) / (4 * n + 2)
    x = (1 - (n - 1) / (8.0 * n ** 3) - 1 / (384.0 * n ** 4) * (39 - 28 / np.sin(theta) ** 2)) * np.cos(theta)
    for _ in range(100):
        p, dp = _legendre_and_derivative(n, x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) < 1e-16:
            break
    p, dp = _legendre_and_derivative(n, x)
    w = 2.0 / ((1 - x * x) * dp * dp)
    if n % 2 == 1:
        x[-1] = 0.0
    nodes = np.concatenate([-x, x[: n // 2][::-1]]) + 0.0
    weights = np.concatenate([w, w[: n // 2][::-1]])
    return QuadratureRule(nodes, weights, n)
