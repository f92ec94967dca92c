import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, mpf

from defexp.errors import PrecisionExhausted
from defexp.zeros_numeric import (
    check_cbar_sums,
    check_thm2,
    f_eval,
    f_prime,
    g_func,
    in_annulus,
    series_error,
    solve_w,
    solve_xk,
    theta_sum,
    zero_set,
)


def test_f_trivial_values():
    assert f_eval(0, "0.3") == 1
    with mp.workdps(60):
        assert abs(f_eval("-0.7", 0) - mpf("0.3")) < mpf("1e-55")
    # q -> 0 limit of the series is 1 + x; at tiny q the q^1 term is x^2 q / 2
    with mp.workdps(40):
        v = f_eval(2, "1e-20", D=40)
        assert abs(v - 3 - 2 * mpf("1e-20")) < mpf("1e-39")


def test_f_matches_direct_sum():
    with mp.workdps(60):
        x, q = mpf("-3.5"), mpf("0.3")
        direct = mpmath.nsum(lambda n: x**n * q ** (n * (n - 1) / 2) / mpmath.factorial(n), [0, mpmath.inf])
        assert abs(f_eval(x, q, D=50) - direct) < mpf("1e-45")


@settings(max_examples=30, deadline=None)
@given(st.floats(-30, 5), st.floats(0.01, 0.6))
def test_derivative_is_f_at_qx(x, q):
    with mp.workdps(60):
        h = mpf("1e-15")
        fd = (f_eval(x + h, q, D=50) - f_eval(x - h, q, D=50)) / (2 * h)
        scale = 1 + abs(f_prime(x, q, D=50))
        assert abs(fd - f_prime(x, q, D=50)) < mpf("1e-20") * scale


def test_derivative_example():
    with mp.workdps(60):
        h = mpf("1e-12")
        fd = (f_eval(mpf("-0.5") + h, "0.3") - f_eval(mpf("-0.5") - h, "0.3")) / (2 * h)
        assert abs(fd - f_eval(mpf("-0.15"), "0.3")) < mpf("1e-20")


def test_precision_exhausted():
    with pytest.raises(PrecisionExhausted):
        f_eval(mpf("-1e30"), "0.1", D=50, dps=60)


def test_q_range_guard():
    with pytest.raises(ValueError):
        solve_xk("0.3", 1)
    with pytest.raises(ValueError):
        solve_xk("1.5", 1, allow_unproven=True)
    x = solve_xk("0.25", 1, D=30, allow_unproven=True)
    assert abs(f_eval(x, "0.25", D=30)) < mpf("1e-25")


def test_first_zero_near_minus_one_for_small_q():
    x = solve_xk("1e-12", 1, D=40)
    assert abs(x + 1) < mpf("1e-11")


@pytest.mark.parametrize("q", ["0.05", "0.1", "0.2"])
@pytest.mark.parametrize("k", range(1, 6))
def test_zero_residuals(q, k):
    x = solve_xk(q, k, D=50)
    assert abs(f_eval(x, q, D=50)) < mpf("1e-45")
    assert in_annulus(x, k, q)


def test_second_zero_annulus_example():
    x = solve_xk("0.1", 2)
    with mp.workdps(30):
        q = mpf("0.1")
        assert 1.26 * q**-0.5 < abs(x) < 2.38 * q**-1.5


def test_expansion_leading_terms():
    # w_1(q) = 1 + q/2 + q^2/2 + ...
    with mp.workdps(50):
        q = mpf("1e-6")
        w = solve_w(q, 1, D=50)
        assert abs(w - (1 + q / 2 + q**2 / 2)) < 10 * q**3


@pytest.mark.parametrize("q", ["0.05", "0.2"])
@pytest.mark.parametrize("k", [1, 2, 6])
def test_fixed_point_alone_is_a_zero(q, k):
    plain = solve_xk(q, k, D=50, newton=False)
    polished = solve_xk(q, k, D=50)
    with mp.workdps(60):
        assert abs(plain - polished) < mpf("1e-45") * abs(polished)


@pytest.fixture(scope="module")
def zeros01():
    return zero_set("0.1", J=40, D=50)


def test_zero_set_decreasing(zeros01):
    assert zeros01.is_decreasing()
    assert len(zeros01.x) == 40
    assert zeros01[1] == zeros01.x[0]


def test_identities_between_zeros(zeros01):
    rep = check_thm2("0.1", J=40, D=50, zeros=zeros01)
    worst = rep.worst()
    assert worst["sum"] < mpf("1e-20")
    assert worst["product"] < mpf("1e-20")
    assert worst["derivative"] < mpf("1e-10")
    assert len(rep.lines()) == 3
    with pytest.raises(ValueError):
        check_thm2("0.1", J=10)


def test_power_sums_of_zeros(zeros01):
    res = check_cbar_sums("0.1", 5, zeros=zeros01)
    with mp.workdps(60):
        assert abs(res[1]["zeros"] - 1) < mpf("1e-20")
        assert abs(res[2]["zeros"] + mpf("0.9")) < mpf("1e-20")
        assert abs(res[3]["zeros"] - mpf("1.701")) < mpf("1e-20")
        assert all(r["residual"] < mpf("1e-20") for r in res.values())


def test_series_matches_numeric_zero(table64):
    for k in (1, 2, 3):
        err = series_error(table64, k, "0.05", 40, D=50)
        assert err["abs"] < mpf("1e-40")


def test_constants_of_the_zero_count():
    assert abs(g_func(0, "1.25", "0.44175") - mpf("1.99164")) < mpf("1e-5")
    assert abs(g_func(1, "1.26", "0.44175") - mpf("1.99999424")) < mpf("1e-8")
    assert abs(theta_sum("0.207875") - mpf("1.9999999368")) < mpf("1e-9")
    assert g_func(2, "2.38", "0.31499") < 2
    assert g_func(3, "3.414", "0.27814") < 2
    with pytest.raises(ValueError):
        g_func(-1, 1, "0.5")
    with pytest.raises(ValueError):
        theta_sum(1)


def test_g_zero_is_a_theta_like_sum():
    # G_0(1; t) = sum t^(n^2/2)/n!
    with mp.workdps(40):
        t = mpf("0.3")
        direct = mpmath.nsum(lambda n: t ** (n * n / 2) / mpmath.factorial(n), [0, mpmath.inf])
        assert abs(g_func(0, 1, t, D=30) - direct) < mpf("1e-28")
