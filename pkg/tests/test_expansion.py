import pytest

from defexp.exactnum import IntPoly
from defexp.expansion import (
    apply_F,
    compute_P,
    compute_P_multinomial,
    compute_tables,
    partitions_with_parts,
    predicted_top_coefficients,
    series_of,
    shifted_table,
    structure_mismatches,
)
from defexp.numtheory import build_qtable, sigma
from defexp.seriesring import series_mul, series_recip

from reference_tables import P_TABLE, PHAT_TABLE


def test_first_coefficients(table10):
    assert table10.P[1] == IntPoly([1])
    assert table10.P[2] == IntPoly([-1, 0, 3])
    assert table10.Phat[1] == IntPoly([1])


@pytest.mark.parametrize("n", range(1, 11))
def test_matches_reference_tables(table10, n):
    assert list(table10.P[n].coeffs) == P_TABLE[n]
    assert list(table10.Phat[n].coeffs) == PHAT_TABLE[n]


def test_independent_route_agrees(table64):
    oracle = compute_P_multinomial(16)
    assert oracle.P[1:] == table64.P[1:17]
    assert oracle.Phat[1:] == table64.Phat[1:17]


def test_full_iterates_agree_with_truncated():
    assert compute_P(14, full=True).P == compute_P(14).P


def test_fixed_point_reproduces_itself(table64):
    N = 20
    w = series_of(table64.P[: N + 1], build_qtable(N))
    assert apply_F(w, N) == w


def test_reciprocal_numerators_are_minus_phat(table64):
    N = 30
    w = series_of(table64.P[: N + 1], build_qtable(N))
    r = series_recip(w, N)
    assert all(r.num[n] == -table64.Phat[n] for n in range(1, N + 1))
    win = series_of(table64.Phat[: N + 1], build_qtable(N), sign=-1)
    assert series_mul(w, win, N).num[1:] == tuple(IntPoly([]) for _ in range(N))


def test_shifted_polynomial(table10):
    P1, _ = shifted_table(table10)
    assert list(P1[3].coeffs) == [11, 29, 63, 65, 28, 4]
    assert list(P1[2].coeffs) == [2, 6, 3]
    assert P1[1] == IntPoly([1])
    _, H1 = shifted_table(table10)
    for n in range(1, 11):
        for x in (0, 3, -5):
            assert P1[n](x) == table10.P[n](x + 1)
            assert H1[n](x) == table10.Phat[n](x + 1)


def test_degrees_and_leading_coefficients(table64):
    M = build_qtable(64).M
    for n in range(2, 65):
        for polys in (table64.P, table64.Phat):
            assert polys[n].degree == M[n] - 2
            assert polys[n].lc == sigma(n)


def test_top_coefficients_closed_form():
    assert predicted_top_coefficients(3, "P") == (4, 8, -7)
    assert predicted_top_coefficients(3, "PHAT") == (4, 8, -13)


def test_structure_holds_to_64(table64):
    assert structure_mismatches(table64) == []


def test_structure_detects_a_perturbed_table(table10):
    from defexp.expansion import PolyTable

    bad = list(table10.P)
    bad[5] = bad[5] + IntPoly.monomial(bad[5].degree - 1)
    found = structure_mismatches(PolyTable(10, bad, table10.Phat))
    assert [(m.n, m.kind) for m in found] == [(5, "P")]


def test_partition_enumeration():
    vecs = list(partitions_with_parts(3, 2))
    assert sorted(tuple(sorted(v.items())) for v in vecs) == [((0, 1), (1, 2)), ((0, 2), (2, 1))]
    for v in partitions_with_parts(4, 5):
        assert sum(v.values()) == 4 and sum(j * c for j, c in v.items()) == 5


def test_rejects_bad_nmax():
    with pytest.raises(ValueError):
        compute_tables(0)
