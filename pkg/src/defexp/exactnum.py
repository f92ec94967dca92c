"""Dense univariate polynomials over the unbounded integers.

Coefficients are stored in ascending order as a tuple of Python ints, with
trailing zeros stripped, so the zero polynomial is the empty tuple.  Every
operation is exact; rational values are ``fractions.Fraction``.

Large products go through Kronecker substitution: both operands are packed
into one big integer each, multiplied as bignums (GMP when gmpy2 is
importable) and unpacked again.  For the coefficient sizes that show up in the expansion
tables this is an order of magnitude faster than the schoolbook loop.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb, gcd
from typing import Iterable, Sequence, Union

from .errors import NotDivisible

try:
    from gmpy2 import mpz as _mpz
except ImportError:  # pragma: no cover - plain CPython bignums still work
    _mpz = None

Number = Union[int, Fraction]

# Below this length (of the shorter operand) the schoolbook loop wins.
KRONECKER_CUTOFF = 12


def _strip(coeffs: Sequence[int]) -> tuple:
    n = len(coeffs)
    while n and coeffs[n - 1] == 0:
        n -= 1
    return tuple(coeffs[:n])


class IntPoly:
    """Immutable dense polynomial with integer coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[int] = ()):
        c = tuple(coeffs)
        for v in c:
            if not isinstance(v, int):
                raise TypeError(f"IntPoly coefficients must be int, got {type(v).__name__}")
        object.__setattr__(self, "coeffs", _strip(c))

    @classmethod
    def _raw(cls, coeffs: tuple) -> "IntPoly":
        # trusted constructor: coeffs is already a stripped tuple of ints
        p = object.__new__(cls)
        object.__setattr__(p, "coeffs", coeffs)
        return p

    def __setattr__(self, name, value):
        raise AttributeError("IntPoly is immutable")

    def __reduce__(self):
        return (IntPoly, (self.coeffs,))

    @classmethod
    def constant(cls, c: int) -> "IntPoly":
        return cls((c,))

    @classmethod
    def monomial(cls, degree: int, c: int = 1) -> "IntPoly":
        return cls((0,) * degree + (c,))

    @classmethod
    def linear(cls, root_shift: int) -> "IntPoly":
        """The polynomial ``x + root_shift``."""
        return cls((root_shift, 1))

    # -- basic queries --------------------------------------------------
    @property
    def degree(self) -> int:
        """Degree, with ``-1`` for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, i: int) -> int:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return 0

    def __eq__(self, other) -> bool:
        if isinstance(other, IntPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, int):
            return self.coeffs == _strip((other,))
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"IntPoly({list(self.coeffs)})"

    def __str__(self) -> str:
        return format_poly(self)

    # -- arithmetic -----------------------------------------------------
    def __neg__(self) -> "IntPoly":
        return IntPoly._raw(tuple(-c for c in self.coeffs))

    def __add__(self, other) -> "IntPoly":
        if isinstance(other, int):
            other = IntPoly((other,))
        if not isinstance(other, IntPoly):
            return NotImplemented
        return IntPoly._raw(_add(self.coeffs, other.coeffs))

    __radd__ = __add__

    def __sub__(self, other) -> "IntPoly":
        if isinstance(other, int):
            other = IntPoly((other,))
        if not isinstance(other, IntPoly):
            return NotImplemented
        return IntPoly._raw(_sub(self.coeffs, other.coeffs))

    def __rsub__(self, other) -> "IntPoly":
        return (-self) + other

    def __mul__(self, other) -> "IntPoly":
        if isinstance(other, int):
            if other == 0:
                return ZERO
            return IntPoly._raw(tuple(c * other for c in self.coeffs))
        if not isinstance(other, IntPoly):
            return NotImplemented
        return IntPoly._raw(mul_coeffs(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "IntPoly":
        if e < 0:
            raise ValueError("negative power of a polynomial")
        result, base = ONE, self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __call__(self, x: Number) -> Number:
        return poly_eval(self, x)

    def content(self) -> int:
        g = 0
        for c in self.coeffs:
            g = gcd(g, c)
            if g == 1:
                break
        return g

    def primitive(self) -> "IntPoly":
        """Content removed, leading coefficient made positive."""
        if not self.coeffs:
            return self
        g = self.content()
        if self.lc < 0:
            g = -g
        if g == 1:
            return self
        return IntPoly._raw(tuple(c // g for c in self.coeffs))


ZERO = IntPoly._raw(())
ONE = IntPoly._raw((1,))
X = IntPoly._raw((0, 1))


def _add(a: tuple, b: tuple) -> tuple:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return _strip(out)


def _sub(a: tuple, b: tuple) -> tuple:
    out = list(a) + [0] * (len(b) - len(a))
    for i, c in enumerate(b):
        out[i] -= c
    return _strip(out)


def _schoolbook(a: tuple, b: tuple) -> tuple:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return tuple(out)


def _kronecker(a: tuple, b: tuple) -> tuple:
    la, lb = len(a), len(b)
    ma, mb = max(map(abs, a)), max(map(abs, b))
    # slots must hold the inputs as well as every product coefficient
    bound = max(ma * mb * min(la, lb), ma, mb)
    nbytes = (bound.bit_length() + 9) // 8
    half = 1 << (8 * nbytes - 1)
    hb = half.to_bytes(nbytes, "little")

    def pack(c: tuple) -> int:
        # each slot holds c_i + half, which lies in [0, 2*half)
        raw = b"".join((v + half).to_bytes(nbytes, "little") for v in c)
        return int.from_bytes(raw, "little") - int.from_bytes(hb * len(c), "little")

    lz = la + lb - 1
    pa, pb = pack(a), pack(b)
    if _mpz is not None:
        prod = int(_mpz(pa) * _mpz(pb))
    else:
        prod = pa * pb
    z = prod + int.from_bytes(hb * lz, "little")
    data = z.to_bytes(nbytes * lz, "little")
    return tuple(
        int.from_bytes(data[i : i + nbytes], "little") - half
        for i in range(0, nbytes * lz, nbytes)
    )


def l1_bits(c: Sequence[int]) -> int:
    """Bit length of the sum of absolute values."""
    return sum(map(abs, c)).bit_length()


class KroneckerPacker:
    """Evaluation at x = 2**(8*nbytes) with signed unpacking.

    Sums of products can be formed entirely on packed values; unpacking is
    correct as long as every coefficient of the final polynomial is below
    2**(8*nbytes - 1) in absolute value.
    """

    __slots__ = ("nbytes", "half", "_hb")

    def __init__(self, bits: int):
        self.nbytes = max(1, (bits + 8) // 8)
        self.half = 1 << (8 * self.nbytes - 1)
        self._hb = self.half.to_bytes(self.nbytes, "little")

    @property
    def bits(self) -> int:
        return 8 * self.nbytes - 1

    def pack(self, c: Sequence[int]):
        if not c:
            return _mpz(0) if _mpz is not None else 0
        nb, half = self.nbytes, self.half
        raw = b"".join((v + half).to_bytes(nb, "little") for v in c)
        v = int.from_bytes(raw, "little") - int.from_bytes(self._hb * len(c), "little")
        return _mpz(v) if _mpz is not None else v

    def unpack(self, z, length: int) -> tuple:
        if length <= 0:
            return ()
        nb, half = self.nbytes, self.half
        z = int(z) + int.from_bytes(self._hb * length, "little")
        data = z.to_bytes(nb * length, "little")
        return _strip(
            [int.from_bytes(data[i : i + nb], "little") - half for i in range(0, nb * length, nb)]
        )


def mul_coeffs(a: tuple, b: tuple) -> tuple:
    """Product of two stripped coefficient tuples."""
    if not a or not b:
        return ()
    if len(a) == 1:
        c = a[0]
        return tuple(c * v for v in b)
    if len(b) == 1:
        c = b[0]
        return tuple(c * v for v in a)
    if min(len(a), len(b)) < KRONECKER_CUTOFF:
        return _schoolbook(a, b)
    return _kronecker(a, b)


def poly_mul(a: IntPoly, b: IntPoly) -> IntPoly:
    return a * b


def poly_divmod(a: IntPoly, b: IntPoly) -> tuple:
    """Division with remainder over Z; requires each quotient step to be integral.

    Raises NotDivisible if a leading coefficient of the running remainder is
    not a multiple of ``b.lc``.
    """
    if b.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(a.coeffs)
    db = b.degree
    lcb = b.lc
    bc = b.coeffs
    if len(rem) - 1 < db:
        return ZERO, a
    quot = [0] * (len(rem) - db)
    for i in range(len(rem) - 1, db - 1, -1):
        c = rem[i]
        if c == 0:
            continue
        qc, r = divmod(c, lcb)
        if r:
            raise NotDivisible(f"leading coefficient {c} not divisible by {lcb}")
        quot[i - db] = qc
        off = i - db
        for j in range(db + 1):
            rem[off + j] -= qc * bc[j]
    return IntPoly(quot), IntPoly(rem)


def poly_exact_div(a: IntPoly, b: IntPoly) -> IntPoly:
    """Return q with a == q*b, or raise NotDivisible."""
    q, r = poly_divmod(a, b)
    if r:
        raise NotDivisible(f"remainder {r!r} when dividing {a!r} by {b!r}")
    return q


def poly_eval(p: IntPoly, x: Number) -> Number:
    """Exact value p(x) for an int or Fraction argument."""
    if isinstance(x, Fraction) and x.denominator != 1:
        # homogenized Horner keeps everything integral until the end
        num, den = x.numerator, x.denominator
        acc = 0
        dpow = 1
        for c in reversed(p.coeffs):
            acc = acc * num + c * dpow
            dpow *= den
        # acc = den^(deg) * p(x) after the loop divides out one factor
        return Fraction(acc, dpow // den) if p.coeffs else Fraction(0)
    xi = int(x)
    acc = 0
    for c in reversed(p.coeffs):
        acc = acc * xi + c
    return Fraction(acc) if isinstance(x, Fraction) else acc


def eval_scaled(p: IntPoly, num: int, den: int) -> int:
    """Integer ``den**deg(p) * p(num/den)``; its sign is the sign of p(num/den)."""
    acc = 0
    dpow = 1
    for c in reversed(p.coeffs):
        acc = acc * num + c * dpow
        dpow *= den
    return acc


def poly_shift(p: IntPoly, h: int = 1) -> IntPoly:
    """Coefficients of p(x + h), by Taylor shift."""
    c = list(p.coeffs)
    n = len(c)
    # repeated synthetic division: O(n^2) additions, no large binomials
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            c[j] += h * c[j + 1]
    return IntPoly._raw(tuple(c))


def poly_derivative(p: IntPoly) -> IntPoly:
    return IntPoly._raw(_strip(tuple(i * c for i, c in enumerate(p.coeffs))[1:]))


def pseudo_remainder(a: IntPoly, b: IntPoly) -> IntPoly:
    """``|lc(b)|**(deg a - deg b + 1) * a`` reduced modulo b.

    The multiplier is positive, so the sign of the remainder is preserved;
    Sturm chains rely on this.
    """
    if b.is_zero():
        raise ZeroDivisionError("pseudo-remainder by zero")
    rem = list(a.coeffs)
    db = b.degree
    bc = b.coeffs
    lcb = bc[-1]
    scale = abs(lcb)
    sign = 1 if lcb > 0 else -1
    da = len(rem) - 1
    if da < db:
        return a
    for i in range(da, db - 1, -1):
        c = rem[i]
        # multiply the running remainder by |lc(b)| and clear the top term
        rem = [scale * v for v in rem[:i]]
        if c:
            off = i - db
            f = sign * c
            for j in range(db):
                rem[off + j] -= f * bc[j]
    return IntPoly(rem)


def poly_gcd(a: IntPoly, b: IntPoly) -> IntPoly:
    """Greatest common divisor, primitive with positive leading coefficient."""
    a, b = a.primitive(), b.primitive()
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    if a.degree < b.degree:
        a, b = b, a
    while not b.is_zero():
        r = pseudo_remainder(a, b)
        a, b = b, r.primitive()
    return a.primitive()


_CERT_PRIME = 2**127 - 1


def _gcd_degree_mod(a: Sequence[int], b: Sequence[int], m: int) -> int:
    """Degree of gcd(a mod m, b mod m) over GF(m); m must be prime."""
    a = list(_strip([c % m for c in a]))
    b = list(_strip([c % m for c in b]))
    while b:
        # reduce a modulo b, making b monic first
        inv = pow(b[-1], -1, m)
        b = [c * inv % m for c in b]
        db = len(b) - 1
        while len(a) - 1 >= db and a:
            c = a[-1]
            off = len(a) - 1 - db
            for j in range(db):
                a[off + j] = (a[off + j] - c * b[j]) % m
            a.pop()
            while a and a[-1] == 0:
                a.pop()
        a, b = b, a
    return len(a) - 1


def is_squarefree(p: IntPoly) -> bool:
    """True when gcd(p, p') is constant.

    A gcd modulo a large prime not dividing lc(p) can only be larger than
    the true one, so a constant modular gcd settles the question without
    any integer remainder sequence.
    """
    if p.degree <= 0:
        return True
    dp = poly_derivative(p)
    if p.lc % _CERT_PRIME and _gcd_degree_mod(p.coeffs, dp.coeffs, _CERT_PRIME) == 0:
        return True
    return poly_gcd(p, dp).degree == 0


def poly_squarefree(p: IntPoly) -> IntPoly:
    """``p / gcd(p, p')``: same roots as p, each simple."""
    if p.degree <= 0:
        return p
    dp = poly_derivative(p)
    if p.lc % _CERT_PRIME and _gcd_degree_mod(p.coeffs, dp.coeffs, _CERT_PRIME) == 0:
        return p
    g = poly_gcd(p, dp)
    if g.degree == 0:
        return p
    return poly_exact_div(p, g)


def from_roots(shifts: Iterable[int]) -> IntPoly:
    """Product of ``x + s`` over the given shifts."""
    out = ONE
    for s in shifts:
        out = out * IntPoly.linear(s)
    return out


def linear_power(shift: int, e: int) -> IntPoly:
    """``(x + shift)**e`` from the binomial theorem."""
    return IntPoly._raw(tuple(comb(e, i) * shift ** (e - i) for i in range(e + 1)))


def format_poly(p: IntPoly, var: str = "k") -> str:
    if p.is_zero():
        return "0"
    parts = []
    for i in range(len(p.coeffs) - 1, -1, -1):
        c = p.coeffs[i]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if i == 0:
            body = str(a)
        else:
            mono = var if i == 1 else f"{var}^{i}"
            body = mono if a == 1 else f"{a}*{mono}"
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for s, b in parts[1:]:
        out += f" {s} {b}"
    return out
