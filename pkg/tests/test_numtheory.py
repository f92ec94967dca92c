from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from defexp.errors import IntegralityViolation
from defexp.exactnum import IntPoly
from defexp.numtheory import (
    a_series,
    b_series,
    build_qtable,
    cbar_polys,
    cbar_vanishes_at_one,
    convolution_sigma,
    divisors,
    exps_sub,
    gamma,
    jacobi_identity_check,
    jacobi_residuals,
    q_exponents,
    sigma,
    triple_product_cubed,
    triple_product_sum,
)

K = IntPoly.monomial(1)


def test_sigma_examples():
    assert sigma(1) == 1
    assert sigma(6) == 12
    assert sigma(10) == 18
    assert sigma(2, 3) == 9
    assert divisors(12) == (1, 2, 3, 4, 6, 12)
    with pytest.raises(ValueError):
        divisors(0)


def test_qtable_examples():
    t = build_qtable(10)
    assert t.Q[3] == K**3 * IntPoly.linear(1) ** 3 * IntPoly.linear(2)
    assert t.M[3] == 7
    assert t.gamma[2] == {1: 2}
    assert gamma(2, 2) == 0
    assert t.Q[2] == K**2 * IntPoly.linear(1) ** 2
    assert t.M[10] == 25
    assert t.Q[0] == IntPoly([1])
    with pytest.raises(ValueError):
        build_qtable(0)


def test_qtable_invariants():
    t = build_qtable(40)
    for n in range(1, 41):
        assert t.Q[n].degree == t.M[n] == t.mu[0][n] + n
        assert t.Q[n].lc == 1
        assert t.M[n] < 3 * n
        assert all(l * l < 2 * n for l in t.gamma[n])
        for k in (1, 2, 7):
            assert t.Q[n](k) > 0
        for j in range(1, n):
            # pair quotient is exact, and equals the polynomial quotient
            assert t.pair_cofactor(n, j) * t.Q[j] * t.Q[n - j] == t.Q[n]
            for l in range(1, 10):
                assert gamma(j, l) + gamma(n - j, l) <= gamma(n, l)
        for m in range(1, n):
            assert t.cofactor(n, t.exps[m]) * t.Q[m] == t.Q[n]


def test_degree_approaches_three_n():
    # M_n >= n (3 - 2/(m+1)) - m using only the first m factors, with m = 10
    m = 10
    for n in (100, 500, 2000, 5000):
        e = q_exponents(n)
        M = sum(e)
        assert M < 3 * n
        assert M >= n * (3 - Fraction(2, m + 1)) - m
    assert sum(q_exponents(5000)) / 5000 > 2.9


def test_integrality_violation_on_bad_cofactor():
    with pytest.raises(IntegralityViolation):
        exps_sub((1, 1), (2,))
    with pytest.raises(IntegralityViolation):
        exps_sub((1,), (0, 1))


def test_a_series_examples():
    a0 = a_series(0, 4)
    assert a0.coeffs[1:] == (1, 3, 4, 7)
    assert a_series(1, 3)[2] == 6
    assert a_series(2, 3)[0] == 0
    assert a0[99] == 0


def test_b_series_examples():
    assert b_series(1, 3)[1] == 1
    assert b_series(2, 3)[1] == -1
    assert b_series(3, 2)[2] == 8
    assert b_series(3, 4) == [0, 1, 8, 17, 50]
    assert all(isinstance(c, Fraction) for c in b_series(3, 5))
    with pytest.raises(ValueError):
        b_series(4, 3)


def test_cbar_examples():
    cb = cbar_polys(5)
    assert cb[1] == IntPoly([1])
    assert cb[2] == IntPoly([-1, 1])
    assert cb[3] == IntPoly([2, -3, 0, 1])
    q = IntPoly.monomial(1)
    assert cb[3] == (q - 1) ** 2 * (q + 2)


def test_cbar_vanishes_at_one():
    assert cbar_vanishes_at_one(30) == []


def test_jacobi_identity():
    assert jacobi_identity_check(1)
    assert jacobi_identity_check(50)
    assert all(r == 0 for r in jacobi_residuals(80)[1:])


def test_triple_product_cube():
    assert triple_product_cubed(3) == [1, -3, 0, 5]
    assert triple_product_cubed(60) == triple_product_sum(60)


def test_convolution_examples():
    assert convolution_sigma(2) == 1
    assert convolution_sigma(3) == 6
    assert convolution_sigma(3, "closed") == 6
    assert (5 * sigma(3, 3) - 17 * sigma(3)) // 12 == 6
    with pytest.raises(ValueError):
        convolution_sigma(1)
    with pytest.raises(RuntimeError):
        convolution_sigma(201, "closed")


@given(st.integers(2, 200))
def test_convolution_closed_form_agrees(n):
    assert convolution_sigma(n, "closed") == convolution_sigma(n)


@given(st.integers(1, 400), st.integers(1, 30))
def test_gamma_is_floor(n, l):
    assert gamma(n, l) == (2 * n) // (l * (l + 1))
