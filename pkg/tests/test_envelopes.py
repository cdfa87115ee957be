import math

import numpy as np
import pytest

from ultrabound.envelopes import (
    RegimeParams,
    bessel_envelope,
    dimension_bound,
    dims_for,
    exp_small_y_bound,
    hermite_decay,
    hermite_envelope,
    hermite_main,
    log_bessel_envelope_array,
    log_exp_small_y_array,
    log_hermite_envelope_array,
    log_hermite_main_array,
    log_universal_array,
    universal_bound,
    universal_first,
    universal_second,
    universal_second_literal,
)
from ultrabound.errors import InvalidIndexError, WrongRegimeError
from ultrabound.halfint import IndexPair, enumerate_I, enumerate_indices, transition_points
from ultrabound.ultra import EvalPoint, eval_X, eval_Y, eval_Y_array

E = math.e


def P(l, m):
    return IndexPair.of(l, m)


def test_regime_params_validation():
    with pytest.raises(ValueError):
        RegimeParams(epsilon=1.0)
    with pytest.raises(ValueError):
        RegimeParams(c=0.0)
    with pytest.raises(ValueError):
        RegimeParams(K=1.0)


class TestHermite:
    def test_examples(self):
        p = P("21/2", 8)
        assert hermite_envelope(2, p, 0.0) == pytest.approx((2 / 21 + 185 / 441) ** -0.25, rel=1e-14)
        assert hermite_envelope(2, p, 0.0) == pytest.approx(1.1806, abs=1e-4)
        a = transition_points(p).a
        assert hermite_main(p, a) == pytest.approx(10.5 ** 0.25, rel=1e-12)
        # decay branch at |x| = 1 with a positive exponent
        rp = RegimeParams(epsilon=0.5, c=0.5, K=1.1)
        assert hermite_envelope(2, P("41/2", 20), 1.0, rp) == 0.0
        assert hermite_envelope(2, P("41/2", 20), -1.0, rp) == 0.0

    def test_decay_forms(self):
        p = P("41/2", 15)
        rp = RegimeParams(epsilon=0.5, c=0.3, K=1.5)
        x = 0.9
        cor = abs(x) ** -0.5 * (1 - x * x) ** (max(0.3 * 0.5 * 20.5 - 0, 0) / 2)
        thm = abs(x) ** -0.5 * (1 - x * x) ** max(0.3 * 20.5, 0)
        assert hermite_decay(2, p, x, rp) == pytest.approx(cor, rel=1e-13)
        assert hermite_decay(2, p, x, rp, form="theorem") == pytest.approx(thm, rel=1e-13)
        with pytest.raises(ValueError):
            hermite_decay(2, p, x, rp, form="other")

    def test_wrong_regime(self):
        with pytest.raises(WrongRegimeError):
            hermite_envelope(2, P("41/2", 2), 0.3)
        with pytest.raises(InvalidIndexError):
            hermite_envelope(3, P("41/2", 20), 0.3)


class TestBessel:
    def test_examples(self):
        p = P("41/2", 4)
        td = transition_points(p)
        pt = EvalPoint.from_y(td.b)
        assert bessel_envelope(2, p, pt) == pytest.approx(20.5 ** 0.5 * 5 ** (-1 / 3), rel=1e-12)
        assert bessel_envelope(2, P("41/2", 0), 1.0) == pytest.approx(20.5 ** 0.5, rel=1e-14)
        small = EvalPoint.from_y(1e-6)
        assert bessel_envelope(3, P(10, "1/2"), small) == pytest.approx(10 * 2 ** -0.5, rel=1e-12)

    def test_pole(self):
        # at y = 0 with d > 2 the cap l^{(d-1)/2} 2^{-m} applies whenever m > 0
        assert bessel_envelope(4, P("7/2", 1), 1.0) == pytest.approx(3.5 ** 1.5 / 2, rel=1e-12)
        # m = 0 is only admissible for d = 2, where no pole exists
        assert math.isfinite(bessel_envelope(2, P("7/2", 0), 1.0))

    def test_wrong_regime(self):
        with pytest.raises(WrongRegimeError):
            bessel_envelope(2, P("41/2", 18), 0.3)


class TestExp:
    def test_examples(self):
        p = P("41/2", 5)
        b = transition_points(p).b
        assert exp_small_y_bound(p, EvalPoint.from_y(b / E)) == pytest.approx(b ** -0.5, rel=1e-12)
        assert exp_small_y_bound(P(4, "1/2"), EvalPoint.from_y(1 / 16)) == pytest.approx(
            8 * (E / 16) ** 0.5, rel=1e-13)

    def test_monotone_in_y(self):
        p = P("61/2", 7)
        ys = np.linspace(0, 1, 50)
        vals = [exp_small_y_bound(p, EvalPoint.from_y(y)) for y in ys]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_m_zero_falls_back(self):
        p = P("9/2", 0)
        assert exp_small_y_bound(p, 0.3) == universal_bound(p, 0.3)


class TestUniversal:
    def test_examples(self):
        for l in ("1/2", "9/2", "31/2"):
            assert universal_bound(P(l, 0), 1.0) == pytest.approx(math.sqrt(float(IndexPair.of(l, 0).ell)), rel=1e-13)
            assert universal_bound(P(l, 0), -1.0) == pytest.approx(math.sqrt(float(IndexPair.of(l, 0).ell)), rel=1e-13)
        p = P(3, "3/2")
        first = math.sqrt(3 / math.sqrt(2.5) * 4)
        second = 3 / math.sqrt(1.5)
        assert universal_first(p, 0.0) == pytest.approx(first, rel=1e-13)
        assert universal_second(p, 0.0) == pytest.approx(second, rel=1e-13)
        assert universal_bound(p, 0.0) == pytest.approx(min(first, second), rel=1e-13)
        assert universal_second_literal(P("9/2", 2), 0.3) == pytest.approx(4.5 ** 0.25, rel=1e-14)

    def test_dominates_with_constant_one(self):
        x = np.linspace(-1, 1, 401)
        worst = 0.0
        for p in enumerate_I(30):
            y = np.abs(eval_Y_array(p, x))
            env = np.exp(log_universal_array(p, x))
            nz = y > 0
            worst = max(worst, float(np.max(y[nz] / env[nz])))
        assert worst <= 1.0 + 1e-12

    def test_literal_constant_grows(self):
        x = np.linspace(-1, 1, 401)

        def const(lmax):
            out = 0.0
            for p in enumerate_I(lmax):
                y = np.abs(eval_Y_array(p, x))
                nz = y > 0
                out = max(out, float(np.max(y[nz] / np.exp(log_universal_array(p, x[nz], literal=True)))))
            return out

        # grows like l^{1/4}: 4^{1/4} = 1.41 from l <= 10 to l <= 40
        assert const(40) > 1.3 * const(10)


class TestDimensionBound:
    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    def test_constant_one(self, d):
        x = np.linspace(-1, 1, 101)
        for p in enumerate_indices(d, 12):
            for t in x:
                assert abs(eval_X(d, p, t)) * (1 - t * t) ** ((d - 2) / 4) <= dimension_bound(d, p, t) * (1 + 1e-12)

    def test_dims_for(self):
        assert dims_for(P("9/2", 2)) == (2, 6)
        assert dims_for(P(5, "3/2")) == (3, 5)
        with pytest.raises(InvalidIndexError):
            dims_for(P("5/2", "3/2"))


class TestArrays:
    def test_match_scalar_and_even(self):
        rp = RegimeParams(epsilon=0.5, c=0.2, K=1.5)
        x = np.concatenate([np.linspace(-1, 1, 61), [0.0]])
        for d in (2, 3, 4):
            for p in enumerate_indices(d, 9):
                pairs = []
                if float(p.m) >= 0.5 * float(p.ell):
                    pairs.append((log_hermite_envelope_array(d, p, x, rp),
                                  lambda t: hermite_envelope(d, p, t, rp)))
                    pairs.append((log_hermite_main_array(p, x), lambda t: hermite_main(p, t)))
                if float(p.m) <= 0.5 * float(p.ell):
                    pairs.append((log_bessel_envelope_array(d, p, x, rp),
                                  lambda t: bessel_envelope(d, p, t, rp)))
                    pairs.append((log_exp_small_y_array(p, x), lambda t: exp_small_y_bound(p, t)))
                pairs.append((log_universal_array(p, x), lambda t: universal_bound(p, t)))
                pairs.append((log_universal_array(p, x, literal=True), lambda t: universal_second_literal(p, t)))
                for logs, f in pairs:
                    ref = np.array([f(float(t)) for t in x])
                    got = np.exp(logs)
                    fin = np.isfinite(ref) & (ref > 1e-300)
                    assert np.allclose(got[fin], ref[fin], rtol=1e-12, atol=0)
                    assert np.all((got[~fin] == ref[~fin]) | (got[~fin] < 1e-300))
                    # even in x
                    for t in (0.13, 0.5, 0.97):
                        a, b = f(t), f(-t)
                        assert a == b or abs(a - b) <= 1e-14 * abs(a)
