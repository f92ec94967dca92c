"""Multiprecision evaluation of f(x;q) = sum x^n q^(n(n-1)/2) / n! and its negative zeros.

Everything here uses mpmath.  Precision ``D`` is the number of decimal
digits the caller wants to trust; internally the working precision is
raised by the size (in digits) of the largest term of the series, because
near a zero the sum is a massive cancellation of terms of that size.

Zeros are found by iterating w <- 1 + q F_k(w; q) for the normalised zero
w = -x_k q^(k-1) / k, then polished by Newton's method on f itself, using
f'(x) = f(qx).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

import mpmath
from mpmath import mp, mpf

from .errors import NoConvergence, PrecisionExhausted

DEFAULT_DIGITS = 50
DEFAULT_J = 40
PROVEN_Q_LIMIT = Fraction(207875, 10**6)
DEFAULT_Q_LIMIT = Fraction(1, 5)
MAX_FIXED_POINT_STEPS = 200


def to_mpf(v) -> mpf:
    """Convert int, Fraction, decimal string or mpf to mpf at the current precision.

    Strings and Fractions are converted exactly up to rounding, so "0.1"
    does not inherit the binary error of the float 0.1.
    """
    if isinstance(v, mpf):
        return +v
    if isinstance(v, Fraction):
        return mpf(v.numerator) / v.denominator
    if isinstance(v, str):
        if "/" in v:
            return to_mpf(Fraction(v))
        return mpf(v)
    return mpf(v)


def _as_fraction(v) -> Optional[Fraction]:
    try:
        return Fraction(str(v)) if not isinstance(v, Fraction) else v
    except (ValueError, TypeError):
        return None


def _check_q(q, allow_unproven: bool) -> None:
    qf = _as_fraction(q)
    if qf is None:
        return
    if not 0 < qf < 1:
        raise ValueError("q must lie in (0, 1)")
    if qf > DEFAULT_Q_LIMIT and not allow_unproven:
        raise ValueError(f"q={q} is above {float(DEFAULT_Q_LIMIT)}; pass allow_unproven=True to go there")


# -- f(x; q) ----------------------------------------------------------------

def log10_max_term(x, q) -> float:
    """log10 of max_n |x^n q^(n(n-1)/2) / n!| (floating, for precision planning)."""
    ax = abs(float(x)) if not isinstance(x, mpf) else float(abs(x))
    lq = math.log10(float(q))
    if ax == 0:
        return 0.0
    lx = math.log10(ax) if ax > 1e-300 else float(mpmath.log10(abs(x)))
    best = 0.0
    n = 0
    val = 0.0
    while True:
        n += 1
        val += lx + (n - 1) * lq - math.log10(n)
        best = max(best, val)
        # past the peak the increments only decrease
        if lx + (n - 1) * lq - math.log10(n) < 0 and val < best - 20:
            break
    return best


def _f_sum(x: mpf, q: mpf, tol: mpf):
    """Sum f(x;q) at the current precision; returns (value, max |term|)."""
    t = mpf(1)
    s = mpf(1)
    big = mpf(1)
    qn = mpf(1)  # q^n for the ratio t_{n+1}/t_n = x q^n / (n+1)
    n = 0
    while True:
        t = t * x * qn / (n + 1)
        n += 1
        qn *= q
        s += t
        at = abs(t)
        if at > big:
            big = at
        # once |x q^n| < (n+1)/2 the remaining tail is below 2|t|
        if at < tol * big and abs(x * qn) < (n + 1) / 2:
            return s, big


def f_eval(x, q, D: int = DEFAULT_DIGITS, dps: Optional[int] = None) -> mpf:
    """f(x; q) with an absolute error well below 10^-D.

    With ``dps`` left as None the working precision is chosen from the
    largest term.  A caller-fixed ``dps`` that leaves fewer than D/2 digits
    after cancellation raises PrecisionExhausted.
    """
    with mp.workdps(max(D, 15) + 10):
        xv, qv = to_mpf(x), to_mpf(q)
        if abs(qv) >= 1:
            raise ValueError("need |q| < 1")
        if qv == 0:
            return 1 + xv
        lead = log10_max_term(xv, qv)
    work = dps if dps is not None else D + int(math.ceil(lead)) + 15
    if dps is not None and work - lead < D / 2:
        raise PrecisionExhausted(f"{dps} digits leave {work - lead:.1f} after cancelling terms of size 1e{lead:.0f}")
    with mp.workdps(work):
        xv, qv = to_mpf(x), to_mpf(q)
        tol = mpf(10) ** (-(work + 5))
        s, _ = _f_sum(xv, qv, tol)
        return +s


def f_prime(x, q, D: int = DEFAULT_DIGITS) -> mpf:
    """d/dx f(x;q) = f(qx; q)."""
    with mp.workdps(max(D, 15) + 10):
        return f_eval(to_mpf(q) * to_mpf(x), q, D)


# -- the fixed-point operator ---------------------------------------------

def falling_ratio(i: int, k) -> mpf:
    """prod_{l=1}^{i} (1 - l/k); zero once i >= k for a positive integer k."""
    p = mpf(1)
    for l in range(1, i + 1):
        p *= 1 - mpf(l) / k
    return p


def fixed_point_operator(w: mpf, q: mpf, k: int, tol: mpf) -> mpf:
    """sum_{i>=1} (-1)^i [a_i(k) w^-i - w^(i+1) / a_i(-k)] q^((i-1)(i+2)/2), a_i the falling ratio.

    After the outer factor q the i-th term sits at q^(i(i+1)/2), the
    triangular number, exactly as in the exact series pipeline.
    """
    s = mpf(0)
    pos = mpf(1)  # a_i(k)
    neg = mpf(1)  # a_i(-k)
    qp = mpf(1)  # q^((i-1)(i+2)/2)
    i = 1
    while True:
        pos *= 1 - mpf(i) / k
        neg *= 1 + mpf(i) / k
        term = (pos * w ** (-i) - w ** (i + 1) / neg) * qp
        s += term if i % 2 == 0 else -term
        if abs(qp * w ** (i + 1)) < tol and i > 1:
            return s
        qp *= q ** (i + 1)
        i += 1


def _annulus(k: int, q: mpf):
    """(lower, upper) for |x_k| in the simple-zero regime; lower is 0 for k = 1."""
    upper = k * q ** (-(mpf(2 * k - 1)) / 2)
    lower = mpf(0) if k == 1 else (k - 1) * q ** (-(mpf(2 * k - 3)) / 2)
    return lower, upper


def in_annulus(x: mpf, k: int, q) -> bool:
    with mp.workdps(30):
        lo, hi = _annulus(k, to_mpf(q))
        return lo < abs(x) < hi


def solve_w(q, k: int, D: int = DEFAULT_DIGITS, allow_unproven: bool = False) -> mpf:
    """Normalised zero w_k(q) by fixed-point iteration from w = 1."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    _check_q(q, allow_unproven)
    with mp.workdps(D + 10):
        qv = to_mpf(q)
        tol = mpf(10) ** (-(D + 8))
        stop = mpf(10) ** (-D)
        w = mpf(1)
        for _ in range(MAX_FIXED_POINT_STEPS):
            w_new = 1 + qv * fixed_point_operator(w, qv, k, tol)
            if abs(w_new - w) < stop:
                return w_new
            w = w_new
    raise NoConvergence(f"fixed point for k={k}, q={q} did not settle in {MAX_FIXED_POINT_STEPS} steps")


def solve_xk(q, k: int, D: int = DEFAULT_DIGITS, allow_unproven: bool = False, newton: bool = True) -> mpf:
    """The k-th zero x_k(q) < 0.

    The fixed point gives about D correct digits; Newton steps on f then
    drive |f(x_k)| below 10^-D at a precision that absorbs the cancellation.
    """
    w = solve_w(q, k, D, allow_unproven)
    with mp.workdps(D + 10):
        qv = to_mpf(q)
        x = -k * qv ** (1 - k) * w
        lead = log10_max_term(x, qv)
    if newton:
        x = _newton(x, q, D, lead)
    with mp.workdps(D + 10):
        if not in_annulus(x, k, q):
            raise NoConvergence(f"x_{k}({q}) = {mpmath.nstr(x, 12)} is outside its annulus")
    return x


def _newton(x: mpf, q, D: int, lead: float) -> mpf:
    work = D + 2 * int(math.ceil(lead)) + 20
    with mp.workdps(work):
        qv = to_mpf(q)
        x = +x
        target = mpf(10) ** (-(D + 5))
        tol = mpf(10) ** (-(work + 5))
        for _ in range(60):
            fx, _ = _f_sum(x, qv, tol)
            dfx, _ = _f_sum(qv * x, qv, tol)
            dx = fx / dfx
            x -= dx
            if abs(fx) < target or abs(dx) <= abs(x) * mpf(10) ** (-(work - 5)):
                return x
    raise NoConvergence("Newton refinement did not converge")


@dataclass
class ZeroSet:
    q: object
    J: int
    D: int
    x: List[mpf] = field(default_factory=list)

    def __getitem__(self, k: int) -> mpf:
        """x_k for 1 <= k <= J."""
        return self.x[k - 1]

    def is_decreasing(self) -> bool:
        return all(self.x[i + 1] < self.x[i] < 0 for i in range(len(self.x) - 1))


def zero_set(q, J: int = DEFAULT_J, D: int = DEFAULT_DIGITS, allow_unproven: bool = False) -> ZeroSet:
    """x_1(q) > x_2(q) > ... > x_J(q)."""
    zs = ZeroSet(q, J, D, [solve_xk(q, k, D, allow_unproven) for k in range(1, J + 1)])
    if not zs.is_decreasing():
        raise NoConvergence("zeros are not strictly decreasing")
    return zs


# -- comparison with the exact expansions -----------------------------------

def series_w(table, k: int, q, N: int, D: int = DEFAULT_DIGITS) -> mpf:
    """1 + sum_{n=1}^{N} P_n(k) / Q_n(k) q^n from an exact table."""
    if N > table.nmax:
        raise ValueError(f"table only reaches n={table.nmax}")
    Q = table.qtable.Q
    with mp.workdps(D + 10):
        qv = to_mpf(q)
        s = mpf(0)
        for n in range(N, 0, -1):
            c = Fraction(table.P[n](k), Q[n](k))
            s = (s + mpf(c.numerator) / c.denominator) * qv
        return 1 + s


def series_xk(table, k: int, q, N: int, D: int = DEFAULT_DIGITS) -> mpf:
    """-k q^(1-k) times the truncated expansion of w_k."""
    with mp.workdps(D + 10):
        return -k * to_mpf(q) ** (1 - k) * series_w(table, k, q, N, D)


def series_error(table, k: int, q, N: int, D: int = DEFAULT_DIGITS) -> Dict[str, mpf]:
    """Absolute and relative gap between the numeric zero and the truncated series."""
    x = solve_xk(q, k, D)
    with mp.workdps(D + 10):
        s = series_xk(table, k, q, N, D)
        err = abs(x - s)
        return {"x": x, "series": s, "abs": err, "rel": err / abs(x)}


# -- identities between the zeros ------------------------------------------

def _derivative(q, k: int, D: int) -> mpf:
    """dx_k/dq by the 5-point central difference with step 10^(-D/3)."""
    with mp.workdps(D + 10):
        qv = to_mpf(q)
        h = mpf(10) ** (-(D // 3))
        pts = {}
        for j in (-2, -1, 1, 2):
            pts[j] = solve_xk(qv + j * h, k, D + 10)
        return (pts[-2] - 8 * pts[-1] + 8 * pts[1] - pts[2]) / (12 * h)


@dataclass
class IdentityReport:
    q: object
    J: int
    D: int
    sum_residual: Dict[int, mpf] = field(default_factory=dict)
    product_residual: Dict[int, mpf] = field(default_factory=dict)
    derivative_residual: Dict[int, mpf] = field(default_factory=dict)
    tail_estimate: Dict[int, mpf] = field(default_factory=dict)

    def worst(self) -> Dict[str, mpf]:
        return {
            "sum": max(self.sum_residual.values()),
            "product": max(self.product_residual.values()),
            "derivative": max(self.derivative_residual.values()) if self.derivative_residual else mpf(0),
        }

    def lines(self) -> List[str]:
        out = []
        for k in sorted(self.sum_residual):
            parts = [
                f"k={k}",
                f"sum_residual={mpmath.nstr(self.sum_residual[k], 5)}",
                f"product_residual={mpmath.nstr(self.product_residual[k], 5)}",
            ]
            if k in self.derivative_residual:
                parts.append(f"derivative_residual={mpmath.nstr(self.derivative_residual[k], 5)}")
            parts.append(f"tail={mpmath.nstr(self.tail_estimate[k], 5)}")
            out.append(" ".join(parts))
        return out


def check_thm2(q, J: int = DEFAULT_J, D: int = DEFAULT_DIGITS, ks: Sequence[int] = (1, 2, 3),
               derivative: bool = True, zeros: Optional[ZeroSet] = None) -> IdentityReport:
    """Residuals of the sum, product and derivative identities among the zeros.

    * sum_j 1/(x_k - q x_j) = 0
    * (q - 1) x_k = prod_{j != k} (x_j - x_k) / (x_j - q x_k)   (relative residual)
    * dx_k/dq = (x_k^2 / 2) sum_j 1/(x_j - q x_k)              (relative residual)

    Truncation at J zeros leaves a tail of size about q^(J-1), reported
    alongside.
    """
    if J < 20:
        raise ValueError("J must be at least 20")
    zs = zeros if zeros is not None else zero_set(q, J, D)
    rep = IdentityReport(q, J, D)
    with mp.workdps(D + 10):
        qv = to_mpf(q)
        xs = zs.x
        for k in ks:
            xk = xs[k - 1]
            s = mpmath.fsum(1 / (xk - qv * xj) for xj in xs)
            rep.sum_residual[k] = abs(s)
            prod = mpmath.fprod((xj - xk) / (xj - qv * xk) for j, xj in enumerate(xs, 1) if j != k)
            lhs = (qv - 1) * xk
            rep.product_residual[k] = abs(prod - lhs) / abs(lhs)
            rep.tail_estimate[k] = abs(xk) * qv ** (J - 1) / (J + 1)
            if derivative:
                d = _derivative(q, k, D)
                rhs = xk**2 / 2 * mpmath.fsum(1 / (xj - qv * xk) for xj in xs)
                rep.derivative_residual[k] = abs(d - rhs) / abs(d)
    return rep


def check_cbar_sums(q, nmaxC: int = 5, J: int = DEFAULT_J, D: int = DEFAULT_DIGITS,
                    zeros: Optional[ZeroSet] = None) -> Dict[int, Dict[str, mpf]]:
    """Compare -(n-1)! sum_{k<=J} x_k^-n with the polynomial C-bar_n evaluated at q."""
    from .numtheory import cbar_polys

    zs = zeros if zeros is not None else zero_set(q, J, D)
    cb = cbar_polys(nmaxC)
    out = {}
    with mp.workdps(D + 10):
        qv = to_mpf(q)
        for n in range(1, nmaxC + 1):
            lhs = -mpmath.factorial(n - 1) * mpmath.fsum(x ** (-n) for x in zs.x)
            rhs = mpmath.polyval(list(reversed(cb[n].coeffs)), qv)
            out[n] = {"zeros": lhs, "poly": rhs, "residual": abs(lhs - rhs)}
    return out


# -- constants from the zero-counting argument ------------------------------

def g_func(k: int, u, t, D: int = DEFAULT_DIGITS) -> mpf:
    """k! sum_{n>=0} u^(n-k) t^((n-k)^2/2) / n!."""
    if k < 0:
        raise ValueError("k must be non-negative")
    with mp.workdps(D + 10):
        uv, tv = to_mpf(u), to_mpf(t)
        if uv <= 0 or not 0 < tv < 1:
            raise ValueError("need u > 0 and 0 < t < 1")
        tol = mpf(10) ** (-(D + 5))
        s = mpf(0)
        n = 0
        while True:
            term = uv ** (n - k) * tv ** (mpf((n - k) ** 2) / 2) / mpmath.factorial(n)
            s += term
            # past n = k the ratio of consecutive terms is u t^(n-k+1/2) / (n+1) and keeps shrinking
            if n > k and term < tol * s and uv * tv ** (n - k + mpf(1) / 2) / (n + 1) < mpf(1) / 2:
                break
            n += 1
        return mpmath.factorial(k) * s


def theta_sum(t, D: int = DEFAULT_DIGITS) -> mpf:
    """sum over all integers m of t^(m^2/2)."""
    with mp.workdps(D + 10):
        tv = to_mpf(t)
        if not 0 < tv < 1:
            raise ValueError("need 0 < t < 1")
        tol = mpf(10) ** (-(D + 5))
        s = mpf(1)
        m = 1
        while True:
            term = tv ** (mpf(m * m) / 2)
            s += 2 * term
            if term < tol:
                return s
            m += 1


__all__ = [
    "IdentityReport",
    "ZeroSet",
    "check_cbar_sums",
    "check_thm2",
    "f_eval",
    "f_prime",
    "g_func",
    "in_annulus",
    "series_error",
    "series_w",
    "series_xk",
    "solve_w",
    "solve_xk",
    "theta_sum",
    "to_mpf",
    "zero_set",
]
