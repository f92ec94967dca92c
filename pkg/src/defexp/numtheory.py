"""Divisor sums, the denominators Q_n(k), and the auxiliary q-series.

Q_n(k) = k^n * prod_{l>=1} (k + l)^gamma(n, l) with gamma(n, l) = floor(2n / (l(l+1))).
Because every Q_n is a product of the same linear factors, a quotient such
as Q_n / (Q_j Q_{n-j}) can be formed by subtracting exponent vectors; a
negative exponent is exactly the failure of divisibility, so the check is
both cheap and exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, isqrt
from typing import Dict, List, Sequence, Tuple

from .errors import IntegralityViolation
from .exactnum import ONE, IntPoly, linear_power

Exponents = Tuple[int, ...]


@lru_cache(maxsize=None)
def divisors(n: int) -> Tuple[int, ...]:
    if n < 1:
        raise ValueError("divisors need n >= 1")
    small, large = [], []
    for d in range(1, isqrt(n) + 1):
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
    return tuple(small + large[::-1])


def sigma(n: int, j: int = 1) -> int:
    """Sum of the j-th powers of the divisors of n."""
    return sum(d**j for d in divisors(n))


def gamma(n: int, l: int) -> int:
    return (2 * n) // (l * (l + 1))


def q_exponents(n: int) -> Exponents:
    """Exponent vector (e_0, e_1, ...) of Q_n: e_0 is the power of k, e_l of (k + l)."""
    if n == 0:
        return ()
    exps = [n]
    l = 1
    while True:
        g = gamma(n, l)
        if g == 0:
            break
        exps.append(g)
        l += 1
    return tuple(exps)


def exps_sub(a: Exponents, b: Exponents) -> Exponents:
    """a - b for exponent vectors; raises IntegralityViolation if any entry goes negative."""
    if len(b) > len(a):
        if any(b[len(a):]):
            raise IntegralityViolation(f"factor exponents {b} exceed {a}")
    out = list(a)
    for i, e in enumerate(b[: len(a)]):
        out[i] -= e
        if out[i] < 0:
            raise IntegralityViolation(f"factor exponents {b} exceed {a}")
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def exps_add(a: Exponents, b: Exponents) -> Exponents:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, e in enumerate(b):
        out[i] += e
    return tuple(out)


@lru_cache(maxsize=None)
def factored_poly(exps: Exponents) -> IntPoly:
    """Expand k^e_0 * prod (k + l)^e_l."""
    p = ONE
    for l, e in enumerate(exps):
        if e == 0:
            continue
        if l == 0:
            p = p * IntPoly.monomial(e)
        else:
            p = p * linear_power(l, e)
    return p


@dataclass(eq=False)
class QTable:
    """gamma, mu_0..mu_2, Q_n and M_n = deg Q_n for 0 <= n <= nmax (Q_0 = 1).

    Built once by :func:`build_qtable` and treated as read-only afterwards.
    """

    nmax: int
    gamma: List[Dict[int, int]]
    mu: List[List[int]]
    Q: List[IntPoly]
    M: List[int]
    exps: List[Exponents] = field(repr=False)
    _pairs: Dict[Tuple[int, int], IntPoly] = field(default_factory=dict, repr=False)
    _meta: Dict[Tuple[int, int], Tuple[int, int]] = field(default_factory=dict, repr=False)

    def cofactor(self, n: int, *parts: Exponents) -> IntPoly:
        """Q_n divided by the product of the factored parts, checked exact."""
        den: Exponents = ()
        for p in parts:
            den = exps_add(den, p)
        return factored_poly(exps_sub(self.exps[n], den))

    def pair_cofactor(self, n: int, j: int) -> IntPoly:
        """Q_n / (Q_j Q_{n-j})."""
        key = (n, j)
        c = self._pairs.get(key)
        if c is None:
            c = self.cofactor(n, self.exps[j], self.exps[n - j])
            self._pairs[key] = c
        return c

    def pair_meta(self, n: int, j: int) -> Tuple[int, int]:
        """(length, bit length of the l1 norm) of Q_n / (Q_j Q_{n-j})."""
        key = (n, j)
        m = self._meta.get(key)
        if m is None:
            c = self.pair_cofactor(n, j).coeffs
            m = self._meta[key] = (len(c), sum(map(abs, c)).bit_length())
        return m


_QTABLES: Dict[int, QTable] = {}


def build_qtable(nmax: int) -> QTable:
    if nmax < 1:
        raise ValueError("nmax must be at least 1")
    if nmax in _QTABLES:
        return _QTABLES[nmax]
    gam: List[Dict[int, int]] = [{}]
    mu = [[0], [0], [0]]
    Q = [ONE]
    M = [0]
    exps: List[Exponents] = [()]
    for n in range(1, nmax + 1):
        e = q_exponents(n)
        g = {l: e[l] for l in range(1, len(e))}
        gam.append(g)
        for j in range(3):
            mu[j].append(sum(l**j * v for l, v in g.items()))
        exps.append(e)
        Q.append(factored_poly(e))
        M.append(mu[0][n] + n)
    table = QTable(nmax, gam, mu, Q, M, exps)
    _QTABLES[nmax] = table
    return table


# -- q-series with exact coefficients -------------------------------------

@dataclass(frozen=True)
class QSeriesInt:
    """Coefficients of q^0..q^order."""

    order: int
    coeffs: Tuple[int, ...]

    def __getitem__(self, n: int) -> int:
        return self.coeffs[n] if 0 <= n <= self.order else 0


def _series_mul(a: Sequence, b: Sequence, order: int) -> list:
    out = [0] * (order + 1)
    for i, ai in enumerate(a[: order + 1]):
        if ai:
            for j in range(order + 1 - i):
                out[i + j] += ai * b[j]
    return out


def a_series(j: int, N: int) -> QSeriesInt:
    """A_j(q) = sum n^j sigma(n) q^n through q^N."""
    if N < 1:
        raise ValueError("N must be at least 1")
    return QSeriesInt(N, (0,) + tuple(n**j * sigma(n) for n in range(1, N + 1)))


def b_series(i: int, N: int) -> List[Fraction]:
    """Coefficients of B_1, B_2 or B_3 through q^N as Fractions."""
    a0 = a_series(0, N).coeffs
    if i == 1:
        return [Fraction(c) for c in a0]
    a1 = a_series(1, N).coeffs
    if i == 2:
        return [Fraction(-c) for c in a1]
    if i == 3:
        a2 = a_series(2, N).coeffs
        sq = _series_mul(a0, a0, N)
        return [
            Fraction(-a0[n], 10) + Fraction(3 * a1[n], 5) + Fraction(a2[n], 2) - Fraction(13 * sq[n], 10)
            for n in range(N + 1)
        ]
    raise ValueError("only B_1, B_2, B_3 are available")


def cbar_polys(nmax: int) -> List[IntPoly]:
    """C-bar_1 .. C-bar_nmax as polynomials in q (index 0 is unused and set to 0)."""
    if nmax < 1:
        raise ValueError("nmax must be at least 1")
    cb = [IntPoly(), ONE]
    for n in range(1, nmax):
        nxt = IntPoly.monomial(n * (n + 1) // 2)
        for j in range(1, n + 1):
            nxt = nxt - cb[n + 1 - j] * IntPoly.monomial(j * (j - 1) // 2, comb(n, j))
        cb.append(nxt)
    return cb


def cbar_vanishes_at_one(nmax: int) -> List[int]:
    """Indices n >= 2 with C-bar_n(1) != 0 (expected empty)."""
    cb = cbar_polys(nmax)
    return [n for n in range(2, nmax + 1) if cb[n](1) != 0]


def jacobi_residuals(N: int) -> List[int]:
    """Coefficients 0..N of A_0 - sum_i (-1)^(i+1) [i(i+1)(2i+1)/6 + (2i+1) A_0] q^(i(i+1)/2)."""
    a0 = a_series(0, N).coeffs
    res = list(a0)
    i = 1
    while i * (i + 1) // 2 <= N:
        t = i * (i + 1) // 2
        sgn = 1 if i % 2 else -1
        res[t] -= sgn * (i * (i + 1) * (2 * i + 1) // 6)
        for n in range(t, N + 1):
            res[n] -= sgn * (2 * i + 1) * a0[n - t]
        i += 1
    return res


def jacobi_identity_check(N: int) -> bool:
    if N < 1:
        raise ValueError("N must be at least 1")
    res = jacobi_residuals(N)
    return all(r == 0 for r in res[1:])


def triple_product_cubed(N: int) -> List[int]:
    """Coefficients of prod_{i>=1} (1 - q^i)^3 through q^N."""
    out = [1] + [0] * N
    for i in range(1, N + 1):
        for _ in range(3):
            for n in range(N, i - 1, -1):
                out[n] -= out[n - i]
    return out


def triple_product_sum(N: int) -> List[int]:
    """Coefficients of sum_{i>=1} (-1)^(i+1) (2i - 1) q^(i(i-1)/2) through q^N."""
    out = [0] * (N + 1)
    i = 1
    while i * (i - 1) // 2 <= N:
        out[i * (i - 1) // 2] += (1 if i % 2 else -1) * (2 * i - 1)
        i += 1
    return out


def convolution_sigma(n: int, method: str = "direct") -> int:
    """sum_{j=1}^{n-1} sigma(j) sigma(n-j)."""
    if n < 2:
        raise ValueError("convolution needs n >= 2")
    if method == "direct":
        return sum(sigma(j) * sigma(n - j) for j in range(1, n))
    if method == "closed":
        if n > _closed_form_validated_to():
            raise RuntimeError(f"closed form not validated up to n={n}")
        num = 5 * sigma(n, 3) + (1 - 6 * n) * sigma(n)
        if num % 12:
            raise ArithmeticError(f"closed form not integral at n={n}")
        return num // 12
    raise ValueError(f"unknown method {method!r}")


_CLOSED_FORM_LIMIT = 200


@lru_cache(maxsize=1)
def _closed_form_validated_to() -> int:
    for n in range(2, _CLOSED_FORM_LIMIT + 1):
        direct = convolution_sigma(n)
        if 12 * direct != 5 * sigma(n, 3) + (1 - 6 * n) * sigma(n):
            return n - 1
    return _CLOSED_FORM_LIMIT


__all__ = [
    "QSeriesInt",
    "QTable",
    "a_series",
    "b_series",
    "build_qtable",
    "cbar_polys",
    "cbar_vanishes_at_one",
    "convolution_sigma",
    "divisors",
    "exps_add",
    "exps_sub",
    "factored_poly",
    "gamma",
    "jacobi_identity_check",
    "jacobi_residuals",
    "q_exponents",
    "sigma",
    "triple_product_cubed",
    "triple_product_sum",
]
