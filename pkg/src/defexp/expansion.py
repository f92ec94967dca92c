"""The numerator polynomials P_n(k) and P-hat_n(k).

With x_k(q) = -k q^(1-k) w_k(q), the normalized zero w_k is the fixed point
of w = 1 + q F_k(w; q) where

    F_k(w; q) = sum_{i>=1} (-1)^i [alpha_i(k) w^-i - alpha_i(-k)^-1 w^(i+1)] q^((i-1)(i+2)/2),
    alpha_i(k) = prod_{l=1}^{i} (1 - l/k).

Starting from w = 1 and iterating inside :class:`SeriesA`, the q^n
numerator is final after n steps.  That numerator is P_n(k); the
reciprocal 1/w = 1 - sum P-hat_n(k)/Q_n(k) q^n gives P-hat_n.

:func:`compute_P_multinomial` is an unrelated route to the same table
(expand the powers of w with the multinomial theorem and use long
division for every denominator) and is kept as a cross-check.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Dict, Iterator, List, Optional, Tuple

from .errors import IntegralityViolation, NotDivisible, StabilizationFailure
from .exactnum import ONE, ZERO, IntPoly, _add, from_roots, mul_coeffs, poly_exact_div, poly_shift
from .numtheory import QTable, build_qtable, convolution_sigma, sigma
from .seriesring import SeriesA, series_mul, series_recip

log = logging.getLogger(__name__)


def tri(i: int) -> int:
    return i * (i + 1) // 2


@dataclass(frozen=True)
class AlphaPair:
    """alpha_i(k) = pos_num / k^i and alpha_i(-k)^-1 = k^i / neg_den."""

    i: int
    pos_num: IntPoly
    neg_den: IntPoly

    @classmethod
    def build(cls, i: int) -> "AlphaPair":
        return cls(i, from_roots(-l for l in range(1, i + 1)), from_roots(range(1, i + 1)))


@dataclass
class PolyTable:
    nmax: int
    P: List[IntPoly]
    Phat: List[IntPoly] = field(default_factory=list)
    provenance: str = "fixed-point"

    def kind(self, kind: str) -> List[IntPoly]:
        kind = kind.upper()
        if kind == "P":
            return self.P
        if kind in ("PHAT", "P_HAT", "HAT"):
            return self.Phat
        raise ValueError(f"unknown kind {kind!r}")

    @property
    def qtable(self) -> QTable:
        return build_qtable(max(self.nmax, 1))


class _Cofactors:
    """Per-(n, i) multipliers that turn the i-th operator term into a numerator over Q_n."""

    def __init__(self, table: QTable):
        self.table = table
        self._pos: Dict[Tuple[int, int], tuple] = {}
        self._neg: Dict[Tuple[int, int], tuple] = {}
        self._alpha: Dict[int, AlphaPair] = {}

    def alpha(self, i: int) -> AlphaPair:
        a = self._alpha.get(i)
        if a is None:
            a = self._alpha[i] = AlphaPair.build(i)
        return a

    def pos(self, n: int, i: int) -> tuple:
        # pos_num_i * Q_n / (k^i Q_s),  s = n - i(i+1)/2
        key = (n, i)
        c = self._pos.get(key)
        if c is None:
            t = self.table
            s = n - tri(i)
            cof = t.cofactor(n, t.exps[s], (i,))
            c = self._pos[key] = mul_coeffs(self.alpha(i).pos_num.coeffs, cof.coeffs)
        return c

    def neg(self, n: int, i: int) -> tuple:
        # k^i * Q_n / ((k+1)...(k+i) Q_s), divisibility from gamma(s,l) + 1 <= gamma(n,l)
        key = (n, i)
        c = self._neg.get(key)
        if c is None:
            t = self.table
            s = n - tri(i)
            cof = t.cofactor(n, t.exps[s], (0,) + (1,) * i)
            c = self._neg[key] = (0,) * i + cof.coeffs
        return c


_COFACTORS: Dict[int, _Cofactors] = {}


def _cofactors(table: QTable) -> _Cofactors:
    c = _COFACTORS.get(id(table))
    if c is None or c.table is not table:
        c = _COFACTORS[id(table)] = _Cofactors(table)
    return c


def operator_terms(N: int) -> int:
    """Largest i whose term can reach q^N after the extra factor q."""
    i = 0
    while tri(i + 1) <= N:
        i += 1
    return i


def apply_F(w: SeriesA, N: int, table: Optional[QTable] = None) -> SeriesA:
    """1 + q F_k(w; q) through q^N, with F_k as in the module docstring."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    table = table or w.table
    if table.nmax < N:
        table = build_qtable(N)
    if N == 0:
        return SeriesA.one(table, 0)
    if w.order < N - 1:
        raise ValueError(f"need w through q^{N - 1}, have q^{w.order}")
    cof = _cofactors(table)
    I = operator_terms(N)

    # powers w^-i and w^(i+1), each only as far as q^(N - i(i+1)/2)
    inv = series_recip(SeriesA(w.num, table, w.order), N - 1) if N > 1 else SeriesA.one(table, 0)
    wt = SeriesA(w.num, table, w.order)
    neg_pows: List[SeriesA] = []
    pos_pows: List[SeriesA] = []
    neg_cur: Optional[SeriesA] = None
    pos_cur = wt
    for i in range(1, I + 1):
        s = N - tri(i)
        neg_cur = inv.truncate(s) if neg_cur is None else series_mul(neg_cur, inv, s)
        pos_cur = series_mul(pos_cur, wt, s)
        neg_pows.append(neg_cur)
        pos_pows.append(pos_cur)

    out: List[IntPoly] = [ONE]
    for n in range(1, N + 1):
        acc: tuple = ()
        for i in range(1, I + 1):
            s = n - tri(i)
            if s < 0:
                break
            u = neg_pows[i - 1].num[s].coeffs
            v = pos_pows[i - 1].num[s].coeffs
            term = _add(mul_coeffs(cof.pos(n, i), u), tuple(-c for c in mul_coeffs(cof.neg(n, i), v)))
            if i % 2:
                term = tuple(-c for c in term)
            acc = _add(acc, term)
        out.append(IntPoly._raw(acc))
    return SeriesA(out, table, N)


def iterate_fixed_point(nmax: int, table: Optional[QTable] = None, full: bool = False) -> Iterator[SeriesA]:
    """Yield w^(1), ..., w^(nmax).

    By default w^(m) is kept through q^m only, the part that is already
    final; ``full=True`` carries every iterate through q^nmax.
    """
    table = table or build_qtable(nmax)
    w = SeriesA.one(table, 0)
    for m in range(nmax):
        order = nmax if full else m + 1
        if w.order < order - 1:
            w = SeriesA(w.num, table, order - 1)
        w = apply_F(w, order, table)
        yield w


def compute_P(nmax: int, full: bool = False) -> PolyTable:
    """P_1..P_nmax from nmax fixed-point steps, with stabilization checked.

    P_n is first read from w^(n); every later iterate must reproduce it, or
    :class:`StabilizationFailure` is raised.
    """
    if nmax < 1:
        raise ValueError("nmax must be at least 1")
    table = build_qtable(nmax)
    settled: List[IntPoly] = [ONE]
    for m, w in enumerate(iterate_fixed_point(nmax, table, full), start=1):
        for n in range(1, m):
            if w.num[n] != settled[n]:
                raise StabilizationFailure(f"coefficient of q^{n} changed at step {m}")
        settled.append(w.num[m])
        log.debug("fixed-point step %d: deg P_%d = %d", m, m, w.num[m].degree)
    return PolyTable(nmax, settled)


def compute_Phat(pt: PolyTable) -> PolyTable:
    """P-hat_n = P_n - sum_{j<n} P-hat_j P_{n-j} Q_n / (Q_j Q_{n-j})."""
    table = build_qtable(pt.nmax)
    P = [p.coeffs for p in pt.P]
    H: List[tuple] = [(1,)]
    for n in range(1, pt.nmax + 1):
        acc = P[n]
        for j in range(1, n):
            term = mul_coeffs(mul_coeffs(H[j], P[n - j]), table.pair_cofactor(n, j).coeffs)
            acc = _add(acc, tuple(-c for c in term))
        H.append(acc)
    pt.Phat = [IntPoly._raw(h) for h in H]
    return pt


def compute_tables(nmax: int, full: bool = False) -> PolyTable:
    return compute_Phat(compute_P(nmax, full))


def series_of(polys: List[IntPoly], table: Optional[QTable] = None, sign: int = 1) -> SeriesA:
    """1 + sign * sum polys[n]/Q_n q^n as a SeriesA."""
    nmax = len(polys) - 1
    table = table or build_qtable(max(nmax, 1))
    nums = [ONE] + [p if sign > 0 else -p for p in polys[1:]]
    return SeriesA(nums, table, nmax)


# -- independent route ---------------------------------------------------

def partitions_with_parts(l: int, m: int) -> Iterator[Dict[int, int]]:
    """Vectors n = (n_0, n_1, ...) with sum n_j = l and sum j n_j = m.

    Yielded as {j: n_j} including j = 0.
    """
    def rec(m_left: int, max_part: int, parts_left: int):
        if m_left == 0:
            yield {}
            return
        if parts_left == 0:
            return
        for j in range(min(m_left, max_part), 0, -1):
            for c in range(1, min(m_left // j, parts_left) + 1):
                for rest in rec(m_left - c * j, j - 1, parts_left - c):
                    d = dict(rest)
                    d[j] = c
                    yield d

    for d in rec(m, m, l):
        used = sum(d.values())
        out = {0: l - used}
        out.update(d)
        yield out


def _multinomial(l: int, nvec: Dict[int, int]) -> int:
    c = factorial(l)
    for v in nvec.values():
        c //= factorial(v)
    return c


def _exact(a: IntPoly, b: IntPoly) -> IntPoly:
    try:
        return poly_exact_div(a, b)
    except NotDivisible as exc:
        raise IntegralityViolation(str(exc)) from exc


def compute_P_multinomial(nmax: int) -> PolyTable:
    """P_n and P-hat_n jointly from the multinomial form of the fixed-point equation.

    Works with plain rational functions: every term is written as
    numerator / denominator with explicit products, and the final
    multiplication by Q_n is done by generic long division.
    """
    if nmax < 1:
        raise ValueError("nmax must be at least 1")
    Q = [ONE]
    for n in range(1, nmax + 1):
        Q.append(_q_direct(n))
    P: List[IntPoly] = [ONE]
    H: List[IntPoly] = [ONE]
    k = IntPoly.monomial(1)
    for n in range(1, nmax + 1):
        total = ZERO
        i = 1
        while tri(i) <= n:
            m = n - tri(i)
            alpha = AlphaPair.build(i)
            ki = k**i
            for nvec in partitions_with_parts(i, m):
                num, den = alpha.pos_num * _multinomial(i, nvec), ki
                for j, c in nvec.items():
                    if j:
                        num = num * H[j] ** c
                        den = den * Q[j] ** c
                if nvec[0] % 2:
                    num = -num
                total = total + _exact(Q[n] * num, den)
            for nvec in partitions_with_parts(i + 1, m):
                num, den = ki * _multinomial(i + 1, nvec), alpha.neg_den
                for j, c in nvec.items():
                    if j:
                        num = num * P[j] ** c
                        den = den * Q[j] ** c
                if i % 2 == 0:
                    num = -num
                total = total + _exact(Q[n] * num, den)
            i += 1
        P.append(total)
        hat = total
        for j in range(1, n):
            hat = hat - _exact(Q[n] * H[j] * P[n - j], Q[j] * Q[n - j])
        H.append(hat)
    return PolyTable(nmax, P, H, provenance="multinomial")


def _q_direct(n: int) -> IntPoly:
    # Q_n rebuilt from its definition, without the shared exponent tables
    p = IntPoly.monomial(n)
    l = 1
    while 2 * n >= l * (l + 1):
        g = (2 * n) // (l * (l + 1))
        p = p * IntPoly.linear(l) ** g
        l += 1
    return p


def shifted_table(pt: PolyTable) -> Tuple[List[IntPoly], List[IntPoly]]:
    """Coefficients of P_n(k+1) and P-hat_n(k+1)."""
    return [poly_shift(p) for p in pt.P], [poly_shift(p) for p in pt.Phat]


# -- closed forms for the top coefficients ---------------------------------

_THIRD_WEIGHT = {"P": 13, "PHAT": 23}


def predicted_top_coefficients(n: int, kind: str = "P") -> Tuple[int, int, int]:
    """Coefficients of k^(M_n-2), k^(M_n-3), k^(M_n-4) predicted from divisor sums (n >= 3).

    The third one is
    sigma(n)/10 * (5n^2 + 6n - 1 + 5 mu_1^2 - 5 mu_2 - 10 n mu_1) - w/10 * sum_j sigma(j) sigma(n-j)
    with weight w = 13 for P and 23 for P-hat.
    """
    kind = kind.upper()
    if kind not in _THIRD_WEIGHT:
        raise ValueError(f"unknown kind {kind!r}")
    if n < 2:
        raise ValueError("closed forms hold for n >= 2")
    t = build_qtable(n)
    s = sigma(n)
    mu1, mu2 = t.mu[1][n], t.mu[2][n]
    second = s * (mu1 - n)
    conv = convolution_sigma(n)
    third = Fraction(s * (5 * n * n + 6 * n - 1 + 5 * mu1 * mu1 - 5 * mu2 - 10 * n * mu1), 10) - Fraction(
        _THIRD_WEIGHT[kind] * conv, 10
    )
    if third.denominator != 1:
        raise IntegralityViolation(f"third coefficient formula is not an integer at n={n}")
    return s, second, int(third)


@dataclass
class StructureMismatch:
    n: int
    kind: str
    what: str
    expected: int
    found: int


def structure_mismatches(pt: PolyTable, start: int = 2) -> List[StructureMismatch]:
    """Compare degree, leading, second and third coefficients with their closed forms.

    The third coefficient is only compared for n >= 3 (at n = 2 the polynomial
    has just three coefficients and the closed form is not claimed there).
    """
    out: List[StructureMismatch] = []
    M = pt.qtable.M
    for kind in ("P", "PHAT"):
        polys = pt.kind(kind)
        for n in range(max(start, 2), pt.nmax + 1):
            p = polys[n]
            d = M[n] - 2
            if p.degree != d:
                out.append(StructureMismatch(n, kind, "degree", d, p.degree))
                continue
            lead, second, third = predicted_top_coefficients(n, kind)
            checks = [("leading", lead, p[d]), ("second", second, p[d - 1])]
            if n >= 3:
                checks.append(("third", third, p[d - 2]))
            for what, exp, got in checks:
                if exp != got:
                    out.append(StructureMismatch(n, kind, what, exp, got))
            if n >= 3 and second <= 0:
                out.append(StructureMismatch(n, kind, "second>0", 1, second))
    return out


__all__ = [
    "AlphaPair",
    "StructureMismatch",
    "predicted_top_coefficients",
    "structure_mismatches",
    "PolyTable",
    "apply_F",
    "compute_P",
    "compute_P_multinomial",
    "compute_Phat",
    "compute_tables",
    "iterate_fixed_point",
    "operator_terms",
    "partitions_with_parts",
    "series_of",
    "shifted_table",
]
