"""Root bounds, non-negativity certificates at positive integers, and coefficient matrices.

Both bounds are upper bounds on the largest real root.  Fractional powers
are never taken in floating point: each i-th root is replaced by a rational
number that is provably at least as large, so a certificate built on the
bound is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import Dict, Iterable, List, Optional, Sequence

from .errors import NonPositiveLeading
from .exactnum import IntPoly, poly_shift

try:
    from gmpy2 import iroot as _gmp_iroot
except ImportError:  # pragma: no cover
    _gmp_iroot = None

DEFAULT_RGRID = (10, 20, 50, 100)
COVER_BITS = 96


def iroot_floor(x: int, i: int) -> int:
    """Largest integer r with r**i <= x (x >= 0)."""
    if x < 0 or i < 1:
        raise ValueError("need x >= 0 and i >= 1")
    if x < 2 or i == 1:
        return x
    if _gmp_iroot is not None:
        return int(_gmp_iroot(x, i)[0])
    # Newton from above on integers
    r = 1 << -(-x.bit_length() // i)
    while True:
        s = ((i - 1) * r + x // r ** (i - 1)) // i
        if s >= r:
            break
        r = s
    while r**i > x:
        r -= 1
    while (r + 1) ** i <= x:
        r += 1
    return r


def root_cover(x: Fraction, i: int, bits: int = COVER_BITS) -> Fraction:
    """A rational R >= x**(1/i), within 2**-bits of it in relative terms.

    The scale is chosen from the size of x, so tiny and huge inputs get the
    same relative accuracy.
    """
    x = Fraction(x)
    if x < 0:
        raise ValueError("root of a negative number")
    if x == 0:
        return Fraction(0)
    if i == 1:
        return x
    # pick t so that x * 2^(t*i) has at least bits*i bits before taking the root
    mag = x.numerator.bit_length() - x.denominator.bit_length()
    t = max(0, bits - mag // i + 1)
    scaled_num = x.numerator << (t * i)
    y = -(-scaled_num // x.denominator)  # ceil(x * 2^(t i))
    r = iroot_floor(y, i)
    if r**i < y:
        r += 1
    return Fraction(r, 1 << t)


def _check_leading(p: IntPoly) -> None:
    if p.is_zero() or p.lc <= 0:
        raise NonPositiveLeading(f"leading coefficient must be positive, got {p.lc if not p.is_zero() else 0}")


def lagrange_bound(p: IntPoly) -> Fraction:
    """Upper cover of the sum of the two largest (|a_{n-i}| / a_n)^(1/i) over negative a_{n-i}."""
    _check_leading(p)
    c = p.coeffs
    n = len(c) - 1
    an = c[-1]
    vals = sorted(
        (root_cover(Fraction(-c[n - i], an), i) for i in range(1, n + 1) if c[n - i] < 0),
        reverse=True,
    )
    if not vals:
        return Fraction(0)
    return vals[0] + (vals[1] if len(vals) > 1 else 0)


def nonneg_tail_start(p: IntPoly) -> int:
    """Least m such that every coefficient a_j with j >= m is non-negative."""
    c = p.coeffs
    m = len(c)
    while m > 0 and c[m - 1] >= 0:
        m -= 1
    return m


def nu_r_bound(p: IntPoly, r) -> Fraction:
    """Upper cover of max(r, 2 c(r)), with b(r) from the non-negative top block of coefficients."""
    _check_leading(p)
    r = Fraction(r)
    if r <= 0:
        raise ValueError("r must be positive")
    m = nonneg_tail_start(p)
    if m == 0:
        return Fraction(0)
    c = p.coeffs
    b = sum((Fraction(c[j]) * r ** (j - m) for j in range(m, len(c))), Fraction(0))
    cr = max(root_cover(Fraction(abs(c[m - i])) / b, i) for i in range(1, m + 1))
    return max(r, 2 * cr)


@dataclass
class BoundReport:
    n: int
    kind: str
    lagrange: Fraction
    nuR: Dict[Fraction, Fraction]
    sweepLimit: int
    allNonnegative: bool
    firstNegativeK: Optional[int] = None
    witness_value: Optional[int] = None
    bound: Fraction = Fraction(0)
    signs: str = ""

    def line(self) -> str:
        """One key=value record."""
        parts = [
            f"n={self.n}",
            f"kind={self.kind}",
            f"lagrange={float(self.lagrange):.6f}",
        ]
        for r in sorted(self.nuR):
            parts.append(f"nu_{_fmt_r(r)}={float(self.nuR[r]):.6f}")
        parts += [
            f"bound={float(self.bound):.6f}",
            f"sweep={self.sweepLimit}",
            f"nonneg={'yes' if self.allNonnegative else 'no'}",
        ]
        if self.firstNegativeK is not None:
            parts.append(f"witness_k={self.firstNegativeK}")
            parts.append(f"witness_value={self.witness_value}")
        return " ".join(parts)


def _fmt_r(r: Fraction) -> str:
    return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"


def nonneg_check(p: IntPoly, r_grid: Iterable = DEFAULT_RGRID, n: int = 0, kind: str = "") -> BoundReport:
    """Certify p(k) >= 0 at every integer k >= 1, or find the first k where it fails.

    Beyond the smallest available root bound B the polynomial is positive, so
    only 1 <= k <= ceil(B) needs an exact evaluation.
    """
    if p.is_zero():
        return BoundReport(n, kind, Fraction(0), {}, 1, True, bound=Fraction(0), signs="0")
    lag = lagrange_bound(p)
    nu = {Fraction(r): nu_r_bound(p, r) for r in r_grid}
    best = min([lag] + list(nu.values()))
    limit = max(1, ceil(best))
    signs = []
    first = None
    value = None
    for k in range(1, limit + 1):
        v = p(k)
        signs.append("+" if v > 0 else "-" if v < 0 else "0")
        if v < 0 and first is None:
            first, value = k, v
    return BoundReport(n, kind, lag, nu, limit, first is None, first, value, best, "".join(signs))


def bound_is_sound(p: IntPoly, bound: Fraction, extra: int = 2) -> bool:
    """Spot check: p is positive at the first few integers beyond the bound."""
    start = ceil(bound)
    return all(p(start + j) > 0 for j in range(1, extra + 1))


# -- coefficient matrices ---------------------------------------------------

@dataclass
class SignMatrix:
    kind: str
    shifted: bool
    entries: List[str] = field(default_factory=list)  # entries[n-1] is the row string for n

    def row(self, n: int) -> str:
        return self.entries[n - 1]

    def to_text(self) -> str:
        return "\n".join(self.entries) + "\n"


def _table_rows(table, kind: str) -> Sequence[IntPoly]:
    return table.kind(kind)


def coefficient_signs(p: IntPoly, length: int) -> str:
    out = []
    for i in range(length):
        c = p[i]
        out.append("+" if c > 0 else "-" if c < 0 else "0")
    return "".join(out)


def sign_matrix(table, kind: str = "P", shifted: bool = False) -> SignMatrix:
    """Signs of the coefficients of P_n(k) (or P_n(k+1) when shifted), row n = 1..nmax.

    Row n lists the coefficients of k^0 .. k^(M_n - 2).
    """
    polys = _table_rows(table, kind)
    M = table.qtable.M
    rows = []
    for n in range(1, table.nmax + 1):
        p = polys[n]
        if shifted:
            p = poly_shift(p, 1)
        rows.append(coefficient_signs(p, M[n] - 1))
    return SignMatrix(kind, shifted, rows)


def digits_matrix(table, kind: str = "P", shifted: bool = False) -> List[List[Optional[int]]]:
    """Decimal length of each |coefficient|; None for a zero coefficient."""
    polys = _table_rows(table, kind)
    M = table.qtable.M
    out = []
    for n in range(1, table.nmax + 1):
        p = polys[n]
        if shifted:
            p = poly_shift(p, 1)
        out.append([len(str(abs(p[i]))) if p[i] else None for i in range(M[n] - 1)])
    return out


def verify_table(table, r_grid: Iterable = DEFAULT_RGRID, kinds: Sequence[str] = ("P", "PHAT"), start: int = 1) -> List[BoundReport]:
    """Non-negativity reports for every n in the table, ordered by kind then n."""
    grid = tuple(r_grid)
    reports = []
    for kind in kinds:
        polys = table.kind(kind)
        for n in range(start, table.nmax + 1):
            reports.append(nonneg_check(polys[n], grid, n, kind))
    return reports


__all__ = [
    "BoundReport",
    "DEFAULT_RGRID",
    "SignMatrix",
    "bound_is_sound",
    "coefficient_signs",
    "digits_matrix",
    "iroot_floor",
    "lagrange_bound",
    "nonneg_check",
    "nonneg_tail_start",
    "nu_r_bound",
    "root_cover",
    "sign_matrix",
    "verify_table",
]
