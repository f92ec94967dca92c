"""Exact real-root counting and isolation on (1, +inf).

Roots are counted without multiplicity: everything runs on the squarefree
part.  Sturm chains are built from sign-preserving pseudo-remainders with
the content divided out, so all arithmetic stays in Z[x].  Isolating
intervals have dyadic endpoints; decimal refinement is plain bisection on
the sign of the polynomial itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

from .exactnum import IntPoly, poly_derivative, poly_squarefree

Interval = Tuple[Fraction, Fraction]


try:
    from gmpy2 import gcd as _gcd, mpz as _big
except ImportError:  # pragma: no cover - plain ints work, only slower
    from math import gcd as _gcd

    _big = int


def _neg_prem_primitive(a: list, b: list) -> list:
    """-prem(a, b) with |lc(b)| as the multiplier, content divided out.

    Works on coefficient lists of GMP integers; the positive multiplier and
    positive content keep the sign pattern a Sturm chain needs.
    """
    rem = list(a)
    db = len(b) - 1
    lcb = b[-1]
    scale = abs(lcb)
    neg = lcb < 0
    for i in range(len(rem) - 1, db - 1, -1):
        c = rem.pop()
        rem = [scale * v for v in rem]
        if c:
            f = -c if neg else c
            off = i - db
            for j in range(db):
                rem[off + j] -= f * b[j]
    while rem and rem[-1] == 0:
        rem.pop()
    if not rem:
        return rem
    g = _big(0)
    for v in rem:
        g = _gcd(g, v)
        if g == 1:
            break
    return [-(v // g) for v in rem]


class _Chain:
    """A Sturm chain kept as GMP coefficient lists for fast repeated evaluation."""

    def __init__(self, p: IntPoly):
        if p.is_zero():
            raise ValueError("Sturm chain of the zero polynomial")
        self.sf = poly_squarefree(p).primitive()
        s0 = [_big(c) for c in self.sf.coeffs]
        rows = [s0]
        if len(s0) > 1:
            rows.append([_big(c) for c in poly_derivative(self.sf).primitive().coeffs])
            while len(rows[-1]) > 1:
                r = _neg_prem_primitive(rows[-2], rows[-1])
                if not r:
                    break
                rows.append(r)
        self.rows = rows

    def polys(self) -> List[IntPoly]:
        return [IntPoly._raw(tuple(int(c) for c in r)) for r in self.rows]

    def variations_at(self, x: Fraction) -> int:
        x = Fraction(x)
        num, den = _big(x.numerator), x.denominator
        shift = den.bit_length() - 1 if den & (den - 1) == 0 else None
        return _variations(_sign(_eval_hom(r, num, den, shift)) for r in self.rows)

    def variations_at_infinity(self) -> int:
        return _variations(_sign(r[-1]) for r in self.rows)


def _eval_hom(c: list, num, den: int, shift: Optional[int]):
    """den^deg * p(num/den); shift = log2(den) when den is a power of two."""
    v = c[-1]
    if shift is not None:
        s = 0
        for a in reversed(c[:-1]):
            s += shift
            v = v * num + (a << s)
        return v
    dpow = _big(1)
    for a in reversed(c[:-1]):
        dpow *= den
        v = v * num + a * dpow
    return v


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def _variations(signs) -> int:
    last = 0
    count = 0
    for s in signs:
        if s == 0:
            continue
        if last and s != last:
            count += 1
        last = s
    return count


def sturm_chain(p: IntPoly) -> List[IntPoly]:
    """Sturm sequence of the squarefree part of p (primitive members)."""
    return _Chain(p).polys()


def _as_chain(chain) -> _Chain:
    if isinstance(chain, _Chain):
        return chain
    c = _Chain.__new__(_Chain)
    c.sf = chain[0]
    c.rows = [[_big(v) for v in p.coeffs] for p in chain]
    return c


def variations_at(chain, x: Fraction) -> int:
    """Sign variations of a chain (list of IntPoly) at a rational point."""
    return _as_chain(chain).variations_at(x)


def variations_at_infinity(chain) -> int:
    return _as_chain(chain).variations_at_infinity()


def count_between(chain, lo: Fraction, hi: Optional[Fraction]) -> int:
    """Distinct roots in (lo, hi]; hi=None means +inf."""
    c = _as_chain(chain)
    v_hi = c.variations_at_infinity() if hi is None else c.variations_at(hi)
    return c.variations_at(lo) - v_hi


def sturm_count(p: IntPoly, lo: Fraction = Fraction(1), hi: Optional[Fraction] = None) -> int:
    """Number of distinct real roots of p in (lo, hi], default (1, +inf); a root at lo is not counted."""
    return count_between(_Chain(p), Fraction(lo), hi)


def cauchy_bound(p: IntPoly) -> Fraction:
    """1 + max |a_i / a_n|: every real root has absolute value below it."""
    lc = abs(p.lc)
    return 1 + Fraction(max((abs(c) for c in p.coeffs[:-1]), default=0), lc)


def positive_root_bound(p: IntPoly) -> Fraction:
    """A power of two strictly above every positive real root of p.

    With lc > 0, any positive root x satisfies x < 2 * max (|a_{d-i}| / a_d)^(1/i)
    over the negative coefficients a_{d-i}; the maximum is rounded up to a
    power of two using integer comparisons only.
    """
    c = p.coeffs if p.lc > 0 else tuple(-v for v in p.coeffs)
    d = len(c) - 1
    lc = c[-1]
    e = 0
    for i in range(1, d + 1):
        a = c[d - i]
        if a >= 0:
            continue
        # smallest e with |a| <= lc * 2^(e*i)
        while -a > lc << (e * i):
            e += 1
    return Fraction(2 ** (e + 1))


def _dyadic_above(x: Fraction) -> Fraction:
    b = Fraction(1)
    while b <= x:
        b *= 2
    return b


@dataclass
class RootCertificate:
    n: int
    kind: str
    count: int
    intervals: List[Interval] = field(default_factory=list)
    decimals: List[str] = field(default_factory=list)
    chain_variations: Tuple[int, int] = (0, 0)

    def largest(self) -> Optional[str]:
        return self.decimals[-1] if self.decimals else None


def isolate_roots(p: IntPoly, lo: Fraction = Fraction(1), n: int = 0, kind: str = "") -> RootCertificate:
    """Disjoint intervals in (lo, +inf), each holding exactly one root of p.

    An interval (a, a) means the root is exactly a.
    """
    chain = _Chain(p)
    sf = chain.sf
    lo = Fraction(lo)
    v_lo = chain.variations_at(lo)
    v_inf = chain.variations_at_infinity()
    total = v_lo - v_inf
    cert = RootCertificate(n, kind, total, chain_variations=(v_lo, v_inf))
    if total == 0:
        return cert
    hi = max(positive_root_bound(sf), _dyadic_above(lo))
    v_hi = chain.variations_at(hi)
    if v_hi != v_inf:
        raise ArithmeticError("root bound does not enclose all roots")
    # stack of (a, b, V(a), V(b)) with roots counted in (a, b]
    stack = [(lo, hi, v_lo, v_hi)]
    found: List[Interval] = []
    while stack:
        a, b, va, vb = stack.pop()
        c = va - vb
        if c == 0:
            continue
        if c == 1:
            found.append(_tighten_endpoints(sf, a, b))
            continue
        m = (a + b) / 2
        vm = chain.variations_at(m)
        stack.append((m, b, vm, vb))
        stack.append((a, m, va, vm))
    found.sort()
    cert.intervals = found
    return cert


def _sign_at(c: list, x: Fraction) -> int:
    den = x.denominator
    shift = den.bit_length() - 1 if den & (den - 1) == 0 else None
    return _sign(_eval_hom(c, _big(x.numerator), den, shift))


def _tighten_endpoints(sf: IntPoly, a: Fraction, b: Fraction) -> Interval:
    """Turn a Sturm-isolated (a, b] into an interval with a sign change or an exact root."""
    c = [_big(v) for v in sf.coeffs]
    sa = _sign_at(c, a)
    sb = _sign_at(c, b)
    if sb == 0:
        return (b, b)
    if sa == 0:
        # the root in (a, b] is not a itself; move b left while keeping its sign
        while True:
            m = (a + b) / 2
            s = _sign_at(c, m)
            if s == 0:
                return (m, m)
            if s != sb:
                return (m, b)
            b = m
    return (a, b)


def interval_is_valid(p: IntPoly, iv: Interval) -> bool:
    """Exact check of an isolating interval against the squarefree part of p."""
    c = [_big(v) for v in poly_squarefree(p).coeffs]
    a, b = Fraction(iv[0]), Fraction(iv[1])
    if a == b:
        return _sign_at(c, a) == 0
    return a < b and _sign_at(c, a) * _sign_at(c, b) < 0


def _floor_scaled(x: Fraction, scale: int) -> int:
    return (x.numerator * scale) // x.denominator


def format_decimal(x: Fraction, digits: int) -> str:
    """x truncated (toward -inf) to ``digits`` places after the point."""
    scale = 10**digits
    v = _floor_scaled(x, scale)
    sign = "-" if v < 0 else ""
    v = abs(v)
    ip, fp = divmod(v, scale)
    return f"{sign}{ip}.{fp:0{digits}d}" if digits else f"{sign}{ip}"


def refine_root(p: IntPoly, iv: Interval, digits: int = 18) -> str:
    """Root inside ``iv`` as a decimal string with ``digits`` correct places (truncated).

    Bisection runs until no grid point k/10^digits lies strictly between the
    ends; once the interval is narrower than one grid step the grid point
    itself is tested, so roots sitting exactly on the grid terminate too.
    """
    a, b = Fraction(iv[0]), Fraction(iv[1])
    if a == b:
        return format_decimal(a, digits)
    c = [_big(v) for v in poly_squarefree(p).coeffs]
    sa = _sign_at(c, a)
    if sa == 0 or sa * _sign_at(c, b) >= 0:
        raise ValueError("interval does not bracket a sign change")
    scale = 10**digits
    step = Fraction(1, scale)
    while True:
        g = Fraction(_floor_scaled(a, scale) + 1, scale)
        if g >= b:
            # the root lies in (a, b), inside a's decimal cell
            return format_decimal(a, digits)
        m = g if b - a < step else (a + b) / 2
        sm = _sign_at(c, m)
        if sm == 0:
            return format_decimal(m, digits)
        if sm == sa:
            a = m
        else:
            b = m


def root_certificate(p: IntPoly, digits: int = 18, n: int = 0, kind: str = "") -> RootCertificate:
    cert = isolate_roots(p, n=n, kind=kind)
    cert.decimals = [refine_root(p, iv, digits) for iv in cert.intervals]
    return cert


def negative_sample(p: IntPoly, cert: RootCertificate) -> Optional[Fraction]:
    """A rational point in (1, +inf) where p itself is negative, taken between isolated roots.

    Returns None when p is non-negative on every gap, which happens when
    all roots have even multiplicity or there are none.
    """
    if not cert.intervals:
        return None
    c = [_big(v) for v in p.coeffs]
    ends = [Fraction(1)] + [x for iv in cert.intervals for x in iv] + [cert.intervals[-1][1] + 1]
    # gaps are (1, lo_1), (hi_1, lo_2), ..., (hi_last, hi_last + 1)
    for a, b in zip(ends[0::2], ends[1::2]):
        if a < b:
            m = (a + b) / 2
            if _sign_at(c, m) < 0:
                return m
    # fall back to points inside the intervals themselves
    for lo, hi in cert.intervals:
        for x in (lo, hi):
            if x > 1 and _sign_at(c, x) < 0:
                return x
    return None


def largest_root(p: IntPoly, digits: int = 18) -> Optional[str]:
    """Largest root in (1, +inf) as a decimal string, or None when there is none."""
    if p.degree <= 0:
        return None
    cert = isolate_roots(p)
    if not cert.intervals:
        return None
    return refine_root(p, cert.intervals[-1], digits)


__all__ = [
    "RootCertificate",
    "cauchy_bound",
    "positive_root_bound",
    "count_between",
    "format_decimal",
    "interval_is_valid",
    "isolate_roots",
    "largest_root",
    "negative_sample",
    "refine_root",
    "root_certificate",
    "sturm_chain",
    "sturm_count",
    "variations_at",
    "variations_at_infinity",
]
