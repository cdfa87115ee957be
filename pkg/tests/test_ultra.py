import math

import mpmath
import numpy as np
import pytest
import scipy.special as sp

from ultrabound.errors import DomainError, InvalidIndexError, ScaledUnderflowError
from ultrabound.halfint import IndexPair, enumerate_I, enumerate_indices
from ultrabound.specfun import gauss_legendre
from ultrabound.ultra import (
    EvalPoint,
    ScaledReal,
    eval_X,
    eval_X_array,
    eval_Y,
    eval_Y_array,
    eval_Y_scaled,
    jacobi_symmetric,
    log_norm_const,
    norm_const,
    y_table,
)


def P(l, m):
    return IndexPair.of(l, m)


class TestScaledReal:
    def test_product_and_sum(self):
        a, b = ScaledReal.from_float(3.0), ScaledReal.from_float(-4.0)
        assert float(a * b) == pytest.approx(-12.0, rel=1e-15)
        assert float(a + b) == pytest.approx(-1.0, rel=1e-15)
        assert float(a - a) == 0.0
        assert float(a * ScaledReal.zero()) == 0.0
        assert float(-a) == pytest.approx(-3.0, rel=1e-15)

    def test_huge_and_tiny(self):
        big = ScaledReal(1, 1000.0)
        with pytest.raises(OverflowError):
            big.to_float()
        tiny = ScaledReal(-1, -720.0)
        with pytest.raises(ScaledUnderflowError):
            tiny.to_float()
        assert float(tiny) == pytest.approx(-math.exp(-720.0), rel=1e-12)
        assert float(big * ScaledReal(1, -999.0)) == pytest.approx(math.e, rel=1e-13)


class TestJacobi:
    def test_examples(self):
        assert float(jacobi_symmetric(0, 3, 0.3)) == 1.0
        for a in (0, 0.5, 2, 7.5):
            assert float(jacobi_symmetric(1, a, 0.3)) == pytest.approx((a + 1) * 0.3, rel=1e-15)
        assert float(jacobi_symmetric(2, 0, 1.0)) == pytest.approx(1.0, rel=1e-15)

    def test_endpoint_binomial(self):
        for j in range(0, 30, 3):
            for a in (0.5, 3.0, 4.5):
                ref = math.exp(math.lgamma(j + a + 1) - math.lgamma(j + 1) - math.lgamma(a + 1))
                assert float(jacobi_symmetric(j, a, 1.0)) == pytest.approx(ref, rel=1e-12)

    def test_against_scipy(self):
        for j in (0, 1, 5, 20, 60):
            for a in (0.0, 0.5, 1.5, 10.0):
                for x in np.linspace(-1, 1, 13):
                    ref = sp.eval_jacobi(j, a, a, x)
                    got = float(jacobi_symmetric(j, a, x))
                    assert abs(got - ref) <= 1e-11 * max(1.0, abs(ref))

    def test_domain(self):
        with pytest.raises(DomainError):
            jacobi_symmetric(3, 1, 1.5)
        with pytest.raises(InvalidIndexError):
            jacobi_symmetric(-1, 1, 0.5)


class TestNormConst:
    def test_examples(self):
        for l in ("1/2", "7/2", "21/2"):
            p = P(l, 0)
            assert float(norm_const(p)) == pytest.approx(math.sqrt(float(p.ell)), rel=1e-14)
        assert float(norm_const(P("3/2", 1))) == pytest.approx(math.sqrt(3) / 2, rel=1e-15)

    def test_naive_gamma_product(self):
        for p in enumerate_I(10):
            l, m = float(p.ell), float(p.m)
            ref = math.sqrt(l * math.gamma(l - m + 0.5) * math.gamma(l + m + 0.5)) / (2 ** m * math.gamma(l + 0.5))
            assert math.exp(log_norm_const(p)) == pytest.approx(ref, rel=1e-12)


class TestEvalY:
    def test_examples(self):
        for x in (-1.0, -0.3, 0.0, 0.8, 1.0):
            assert eval_Y(P("1/2", 0), x) == pytest.approx(1 / math.sqrt(2), rel=1e-15)
        assert eval_Y(P("3/2", 1), 0.0) == pytest.approx(math.sqrt(3) / 2, rel=1e-15)

    def test_endpoint_oracle(self):
        for l in ("1/2", "9/2", "81/2"):
            p = P(l, 0)
            assert eval_Y(p, 1.0) ** 2 == pytest.approx(float(p.ell), rel=1e-12)
            assert eval_Y(P(l, 0), 1.0) > 0

    def test_ferrers_oracle(self):
        # Y_{l,m} = sqrt(l Gamma(l+m+1/2)/Gamma(l-m+1/2)) P^{-m}_{l-1/2}(x)
        mpmath.mp.dps = 30
        for l, m in [("5/2", 1), (4, "3/2"), (6, "5/2"), ("21/2", 3)]:
            p = P(l, m)
            lf, mf = float(p.ell), float(p.m)
            for x in (-0.7, 0.1, 0.55, 0.93):
                ref = mpmath.sqrt(lf * mpmath.gamma(lf + mf + 0.5) / mpmath.gamma(lf - mf + 0.5)) \
                    * mpmath.legenp(lf - 0.5, -mf, x, type=2)
                assert eval_Y(p, x) == pytest.approx(float(ref), rel=1e-10, abs=1e-13)

    def test_scaled_vs_naive(self):
        rng = np.random.default_rng(3)
        for p in enumerate_I(150)[::97]:
            x = float(rng.uniform(-1, 1))
            l, m = float(p.ell), float(p.m)
            try:
                c = math.sqrt(l * math.gamma(l - m + 0.5) * math.gamma(l + m + 0.5)) / (2 ** m * math.gamma(l + 0.5))
            except OverflowError:
                continue
            naive = c * (1 - x * x) ** (m / 2) * sp.eval_jacobi(p.degree, m, m, x)
            if not math.isfinite(naive) or naive == 0.0:
                continue
            assert eval_Y(p, x) == pytest.approx(naive, rel=1e-10, abs=1e-300)

    def test_no_overflow_large_degree(self):
        for p in [P("4001/2", 0), P("4001/2", 1000), P(2000, "3999/2"), P("801/2", 200)]:
            for x in (0.0, 0.5, 0.999999, 1 - 1e-15, 1.0):
                v = eval_Y_scaled(p, x)
                assert v.sign == 0 or math.isfinite(v.log_mag)
                assert math.isfinite(eval_Y(p, x))

    def test_array_matches_scalar(self):
        x = np.linspace(-1, 1, 41)
        for p in [P("1/2", 0), P("15/2", 2), P(20, "13/2"), P("301/2", 75)]:
            arr = eval_Y_array(p, x)
            ref = np.array([eval_Y(p, float(t)) for t in x])
            assert np.allclose(arr, ref, rtol=1e-12, atol=1e-14 * np.max(np.abs(ref)))

    def test_table_matches_scalar(self):
        x = np.linspace(-1, 1, 57)
        for m in (0, "1/2", 3, "15/2"):
            two_ells, T = y_table(m, 60, x)
            for k in range(0, len(two_ells), 7):
                p = IndexPair.from_twice(two_ells[k], IndexPair.of(1, m).m.twice)
                ref = eval_Y_array(p, x)
                assert np.max(np.abs(T[k] - ref)) <= 1e-12 * max(1.0, np.max(np.abs(ref)))

    def test_table_log_mode(self):
        x = np.linspace(-1, 1, 21)
        two_ells, T = y_table(2, 30, x)
        _, s, la = y_table(2, 30, x, log=True)
        assert np.allclose(s * np.exp(la), T, rtol=1e-13, atol=0)

    def test_table_large_ell_finite(self):
        x = np.array([0.0, 0.5, 0.99, 0.999999])
        _, s, la = y_table(0, 400, x, log=True)
        assert np.all(np.isfinite(la) | (s == 0))
        _, s, la = y_table(300, 400, x, log=True)
        assert np.all(np.isfinite(la[:, 1:3]))

    def test_not_in_I(self):
        with pytest.raises(InvalidIndexError):
            eval_Y(P("5/2", "3/2"), 0.3)
        with pytest.raises(DomainError):
            eval_Y(P("5/2", 1), 1.2)


class TestEvalX:
    def test_d2_equals_Y(self):
        for p in enumerate_indices(2, 6):
            for x in (-0.9, 0.0, 0.4):
                assert eval_X(2, p, x) == eval_Y(p, x)

    def test_d3_constant(self):
        for x in (-0.99, -0.2, 0.0, 0.7):
            assert eval_X(3, P(1, "1/2"), x) ** 2 == pytest.approx(2 / math.pi, rel=1e-14)

    def test_weighted_normalization_d4(self):
        p = P("7/2", 1)
        rule = gauss_legendre(40)
        got = rule.integrate(lambda x: eval_X_array(4, p, x) ** 2 * (1 - x * x))
        assert got == pytest.approx(1.0, abs=1e-12)

    def test_endpoints(self):
        # m > (d-2)/2: vanishes at +-1; m = (d-2)/2: finite, nonzero
        assert eval_X(3, P(3, "3/2"), 1.0) == 0.0
        v = eval_X(3, P(3, "1/2"), 1.0)
        assert math.isfinite(v) and v != 0.0
        assert eval_X(3, P(3, "1/2"), 1 - 1e-12) == pytest.approx(v, rel=1e-6)
        with pytest.raises(InvalidIndexError):
            eval_X(3, P("5/2", 1), 0.2)

    def test_evalpoint(self):
        pt = EvalPoint.from_y(0.6, sign=-1)
        assert pt.x == pytest.approx(-0.8, rel=1e-15)
        assert eval_Y(P("9/2", 2), pt) == pytest.approx(eval_Y(P("9/2", 2), -0.8), rel=1e-13)
        with pytest.raises(DomainError):
            EvalPoint.from_x(1.5)
