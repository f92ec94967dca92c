"""Truncated q-series whose q^n coefficient is an integer polynomial over Q_n(k).

A :class:`SeriesA` stores only numerators; the denominator of the q^n
coefficient is always literally Q_n(k), never a reduced form.  Products
and reciprocals stay in the class because Q_n / (Q_j Q_{n-j}) is a
polynomial, so all arithmetic here is multiplication and addition of
integer polynomials.  The only place divisibility can fail is forming a
cofactor, which raises :class:`IntegralityViolation`.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Tuple

from .errors import IntegralityViolation
from .exactnum import ONE, ZERO, IntPoly, KroneckerPacker, l1_bits
from .numtheory import QTable, build_qtable


class SeriesA:
    """1 + sum_{n=1}^{order} (num[n] / Q_n(k)) q^n."""

    __slots__ = ("order", "num", "table")

    def __init__(self, num: Sequence[IntPoly], table: Optional[QTable] = None, order: Optional[int] = None):
        nums = list(num)
        if not nums:
            nums = [ONE]
        if nums[0] != ONE:
            raise ValueError("series in this class have constant term 1")
        if order is None:
            order = len(nums) - 1
        nums = nums[: order + 1] + [ZERO] * (order + 1 - len(nums))
        if table is None:
            table = build_qtable(max(order, 1))
        if table.nmax < order:
            raise ValueError(f"denominator table only reaches n={table.nmax}")
        self.order = order
        self.num = tuple(nums)
        self.table = table

    @classmethod
    def one(cls, table: QTable, order: int = 0) -> "SeriesA":
        return cls([ONE], table, order)

    def __getitem__(self, n: int) -> IntPoly:
        return self.num[n] if 0 <= n <= self.order else ZERO

    def truncate(self, order: int) -> "SeriesA":
        if order > self.order:
            raise ValueError("cannot extend a truncated series")
        return SeriesA(self.num[: order + 1], self.table, order)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SeriesA):
            return NotImplemented
        return self.order == other.order and self.num == other.num

    def __repr__(self) -> str:
        return f"SeriesA(order={self.order}, num={[list(p.coeffs) for p in self.num[1:]]})"

    def __mul__(self, other: "SeriesA") -> "SeriesA":
        return series_mul(self, other, min(self.order, other.order))

    def coefficient(self, n: int, k):
        """Value of the q^n coefficient at a given k (int or Fraction)."""
        from fractions import Fraction

        return Fraction(self[n](k)) / Fraction(self.table.Q[n](k))


def _check_order(a: SeriesA, N: int) -> None:
    if a.order < N:
        raise ValueError(f"series known to order {a.order}, need {N}")


class _PackedCofactors:
    """Packed Q_n / (Q_j Q_{n-j}) for one slot width, shared across calls."""

    _cache: Dict[Tuple[int, int], Dict[Tuple[int, int], object]] = {}

    def __init__(self, table: QTable, packer: KroneckerPacker):
        self.table = table
        self.packer = packer
        key = (id(table), packer.nbytes)
        store = self._cache.get(key)
        if store is None:
            if len(self._cache) > 6:
                self._cache.clear()
            store = self._cache[key] = {}
        self.store = store

    def __call__(self, n: int, j: int):
        key = (n, j)
        v = self.store.get(key)
        if v is None:
            v = self.store[key] = self.packer.pack(self.table.pair_cofactor(n, j).coeffs)
        return v


def _cof_meta(table: QTable, n: int, j: int) -> Tuple[int, int]:
    return table.pair_meta(n, j)


def _packer_for(bits: int) -> KroneckerPacker:
    # round the slot to 8-byte multiples so packed cofactors get reused
    nbytes = -(-(bits + 8) // 64) * 8
    return KroneckerPacker(8 * nbytes - 8)


def _pick_table(a: SeriesA, b: SeriesA) -> QTable:
    return a.table if a.table.nmax >= b.table.nmax else b.table


def series_mul(a: SeriesA, b: SeriesA, N: int) -> SeriesA:
    """Product through q^N: R_n Q_n = sum_j A_j B_{n-j} Q_n / (Q_j Q_{n-j}).

    Each coefficient's convolution is summed on Kronecker-packed integers and
    unpacked once.
    """
    _check_order(a, N)
    _check_order(b, N)
    table = _pick_table(a, b)
    an = [p.coeffs for p in a.num[: N + 1]]
    bn = [p.coeffs for p in b.num[: N + 1]]
    ba = [l1_bits(c) for c in an]
    bb = [l1_bits(c) for c in bn]
    need = 0
    for n in range(1, N + 1):
        for j in range(0, n + 1):
            if not an[j] or not bn[n - j]:
                continue
            cb = _cof_meta(table, n, j)[1] if 0 < j < n else 1
            need = max(need, ba[j] + bb[n - j] + cb)
    packer = _packer_for(need + N.bit_length() + 1)
    pc = _PackedCofactors(table, packer)
    pa = [packer.pack(c) for c in an]
    pb = [packer.pack(c) for c in bn]
    out: List[IntPoly] = [ONE]
    for n in range(1, N + 1):
        z = pa[n] + pb[n]
        length = max(len(an[n]), len(bn[n]))
        for j in range(1, n):
            if not an[j] or not bn[n - j]:
                continue
            z += pa[j] * pb[n - j] * pc(n, j)
            length = max(length, len(an[j]) + len(bn[n - j]) + _cof_meta(table, n, j)[0] - 2)
        out.append(IntPoly._raw(packer.unpack(z, length)))
    return SeriesA(out, table, N)


def series_square(a: SeriesA, N: int) -> SeriesA:
    """a*a through q^N."""
    return series_mul(a, a, N)


def series_recip(a: SeriesA, N: int) -> SeriesA:
    """1/a through q^N; b_n Q_n = -sum_{j=1}^n A_j B_{n-j} Q_n / (Q_j Q_{n-j})."""
    _check_order(a, N)
    table = a.table
    an = [p.coeffs for p in a.num[: N + 1]]
    ba = [l1_bits(c) for c in an]
    bn: List[tuple] = [(1,)]
    bb = [1]
    packer: Optional[KroneckerPacker] = None
    pa: list = []
    pb: list = []
    pc = None
    # every a_n is packed up front, so the slot must hold the largest of them
    floor_bits = max(ba) + 1
    for n in range(1, N + 1):
        need = max(ba[n], floor_bits)
        for j in range(1, n):
            if an[j] and bn[n - j]:
                need = max(need, ba[j] + bb[n - j] + _cof_meta(table, n, j)[1])
        need += n.bit_length() + 1
        if packer is None or need > packer.bits:
            # widen with slack; repack everything known so far
            packer = _packer_for(need + need // 4)
            pc = _PackedCofactors(table, packer)
            pa = [packer.pack(c) for c in an]
            pb = [packer.pack(c) for c in bn]
        z = pa[n]
        length = len(an[n])
        for j in range(1, n):
            if not an[j] or not bn[n - j]:
                continue
            z += pa[j] * pb[n - j] * pc(n, j)
            length = max(length, len(an[j]) + len(bn[n - j]) + _cof_meta(table, n, j)[0] - 2)
        c = tuple(-v for v in packer.unpack(z, length))
        bn.append(c)
        bb.append(l1_bits(c))
        pb.append(packer.pack(c))
    return SeriesA([IntPoly._raw(c) for c in bn], table, N)


def series_mul_plain(a: SeriesA, b: SeriesA, N: int) -> SeriesA:
    """Term-by-term polynomial products; slower reference for :func:`series_mul`."""
    _check_order(a, N)
    _check_order(b, N)
    table = _pick_table(a, b)
    out: List[IntPoly] = [ONE]
    for n in range(1, N + 1):
        acc = a.num[n] + b.num[n]
        for j in range(1, n):
            acc = acc + a.num[j] * b.num[n - j] * table.pair_cofactor(n, j)
        out.append(acc)
    return SeriesA(out, table, N)


def series_pow(a: SeriesA, e: int, N: int) -> SeriesA:
    """a**e through q^N for any nonzero integer e."""
    if e == 0:
        raise ValueError("exponent must be nonzero")
    _check_order(a, N)
    base = a.truncate(N) if e > 0 else series_recip(a, N)
    e = abs(e)
    result: Optional[SeriesA] = None
    while True:
        if e & 1:
            result = base if result is None else series_mul(result, base, N)
        e >>= 1
        if not e:
            break
        base = series_square(base, N)
    return result


def lift_coeff(p: IntPoly, from_order: int, to_order: int, table: QTable) -> IntPoly:
    """Re-express p / Q_j as a numerator over Q_n, i.e. p * Q_n / Q_j."""
    if not 1 <= from_order <= to_order:
        raise ValueError("need 1 <= from_order <= to_order")
    if from_order == to_order:
        return p
    return p * table.cofactor(to_order, table.exps[from_order])


__all__ = [
    "IntegralityViolation",
    "SeriesA",
    "lift_coeff",
    "series_mul",
    "series_mul_plain",
    "series_pow",
    "series_recip",
    "series_square",
]
