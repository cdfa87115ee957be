import math
from fractions import Fraction

import pytest

from ultrabound.errors import (
    DegenerateIndexError,
    DomainError,
    InvalidDimensionError,
    InvalidIndexError,
    UndefinedXbarError,
)
from ultrabound.halfint import (
    HalfInt,
    IndexPair,
    enumerate_I,
    enumerate_indices,
    harmonic_dim,
    laplace_eigenvalue,
    q_factor,
    q_value,
    sphere_measure,
    transition_points,
)


def P(l, m):
    return IndexPair.of(l, m)


class TestHalfInt:
    def test_construction(self):
        assert HalfInt.of("3/2").twice == 3
        assert HalfInt.of(2).twice == 4
        assert HalfInt.of(2.5).twice == 5
        assert HalfInt.of(Fraction(7, 2)).value == Fraction(7, 2)
        with pytest.raises(InvalidIndexError):
            HalfInt.of("1/3")
        with pytest.raises(InvalidIndexError):
            HalfInt.of(0.25)

    def test_arithmetic_is_exact(self):
        a, b = HalfInt.of("3/2"), HalfInt.of("5/2")
        assert (a + b).twice == 8
        assert (b - a).twice == 2
        assert -a == HalfInt(-3)
        assert a < b
        assert float(a) == 1.5
        assert str(a) == "3/2" and str(a + b) == "4"

    def test_membership(self):
        assert HalfInt.of(1).is_integer()
        assert not HalfInt.of("1/2").is_integer()
        assert HalfInt.of("1/2").in_N_k(2)
        assert not HalfInt.of("1/2").in_N_k(3)
        assert HalfInt.of(1).in_N_k(3)
        assert not HalfInt.of(0).in_N_k(3)


class TestIndexPair:
    def test_I_membership(self):
        assert P("1/2", 0).in_I()
        assert P(3, "3/2").in_I()
        assert not P("5/2", "3/2").in_I()
        assert not P(1, 1).in_I()
        assert not P("1/2", "-1/2").in_I()

    def test_I_d_membership(self):
        assert P("3/2", 1).in_I_d(2)
        assert not P("3/2", 1).in_I_d(3)
        assert P(1, "1/2").in_I_d(3)
        assert P("7/2", 1).in_I_d(4)
        assert not P("7/2", "3/2").in_I_d(4)

    def test_degree(self):
        assert P("7/2", 1).degree == 2
        assert P("1/2", 0).degree == 0


class TestEnumerate:
    def test_examples(self):
        assert enumerate_indices(2, "3/2") == [P("1/2", 0), P("3/2", 0), P("3/2", 1)]
        assert enumerate_indices(3, 1) == [P(1, "1/2")]
        assert enumerate_indices(2, 0) == []
        with pytest.raises(InvalidDimensionError):
            enumerate_indices(1, 3)

    @pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
    def test_all_in_I_d(self, d):
        pairs = enumerate_indices(d, 15)
        assert pairs == sorted(pairs)
        for p in pairs:
            assert p.in_I_d(d)
            diff = p.ell.twice - p.m.twice
            assert diff > 0 and diff % 2 == 1

    def test_enumerate_I_count(self):
        pairs = enumerate_I(10)
        # for each 2l = n there are ceil(n/2) admissible m
        assert len(pairs) == sum((n + 1) // 2 for n in range(1, 21))
        assert all(p.in_I() for p in pairs)
        assert len(set(pairs)) == len(pairs)


class TestTransition:
    def test_examples(self):
        td = transition_points(P("1/2", 0))
        assert td.a == 1.0 and td.b == 0.0 and td.xbar is None
        td = transition_points(P("5/2", "3/2"))
        assert td.a == pytest.approx(0.8, abs=1e-15) and td.b == pytest.approx(0.6, abs=1e-15)
        assert transition_points(P("7/2", "5/2")).xbar == pytest.approx(0.75, abs=1e-15)
        with pytest.raises(DegenerateIndexError):
            transition_points(P(0, 0))

    def test_invariants(self):
        for p in enumerate_I(40):
            td = transition_points(p)
            assert abs(td.a ** 2 + td.b ** 2 - 1.0) <= 4.5e-16
            # a^2 >= 1/(2l) exactly: (2l)^2 - (2m)^2 >= 2l
            te, tm = p.ell.twice, p.m.twice
            assert te * te - tm * tm >= te
            if p.m.twice > 2:
                assert td.a <= td.xbar <= 8 * td.a
            else:
                assert td.xbar is None

    def test_a2_b2_large_ell(self):
        for te in (2 * 10**6 - 1, 999_999, 12345):
            for tm in (0, 1, te // 3, te - 1):
                td = transition_points(IndexPair.from_twice(te, tm))
                assert abs(td.a ** 2 + td.b ** 2 - 1.0) <= 4.5e-16


class TestQ:
    def test_examples(self):
        p = P("7/2", "5/2")
        assert q_factor(p, 0.75) == 0.0
        assert q_factor(p, 0.0) == pytest.approx(-27 / 4, rel=1e-15)
        assert q_factor(p, 1 - 1e-9) > 1e15
        with pytest.raises(UndefinedXbarError):
            q_factor(P("3/2", 1), 0.5)
        with pytest.raises(DomainError):
            q_factor(p, 1.0)

    def test_general_form_agrees(self):
        for p in [P("7/2", "5/2"), P(10, "7/2"), P("41/2", 9)]:
            for x in (0.0, 0.3, -0.7, 0.95):
                assert q_value(p, x) == pytest.approx(q_factor(p, x), rel=1e-12, abs=1e-12)


class TestDimensions:
    def test_laplace(self):
        assert laplace_eigenvalue(2, "3/2") == 2
        assert laplace_eigenvalue(3, 1) == 0
        assert laplace_eigenvalue(3, 2) == 3
        assert laplace_eigenvalue(5, 2) == 0
        with pytest.raises(InvalidIndexError):
            laplace_eigenvalue(3, "3/2")

    def test_harmonic_dim(self):
        for d in range(1, 7):
            assert harmonic_dim(d, HalfInt(d - 1)) == 1
        assert harmonic_dim(2, "5/2") == 5
        assert harmonic_dim(3, 3) == 9
        # circle: 2 for every positive degree
        assert [harmonic_dim(1, k) for k in range(5)] == [1, 2, 2, 2, 2]

    def test_harmonic_dim_growth_band(self):
        for d in (2, 3, 4):
            ratios = []
            for lp in range(1, 501):
                ell = HalfInt(2 * lp + d - 1)
                ratios.append(harmonic_dim(d, ell) / float(ell) ** (d - 1))
            assert max(ratios) / min(ratios) < 2.0 ** d

    def test_sphere_measure(self):
        assert sphere_measure(1) == pytest.approx(2 * math.pi, rel=1e-14)
        assert sphere_measure(2) == pytest.approx(4 * math.pi, rel=1e-14)
        assert sphere_measure(3) == pytest.approx(2 * math.pi ** 2, rel=1e-14)
        with pytest.raises(InvalidDimensionError):
            sphere_measure(0)
