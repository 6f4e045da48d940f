from fractions import Fraction
from math import gcd

import pytest

from mfgens.arith import divisors, totient
from mfgens.modcurve import (
    cusps_gamma0,
    degree_omega_gamma1,
    dim_mk_gamma0,
    dim_mk_sl2,
    dim_mk_star,
    has_no_elliptic_gamma0,
    index_gamma0,
    index_gamma1,
    invariants_gamma0,
    mass_formula_rhs,
    sturm_bound_gamma0,
    weight_bound_complex,
)
from mfgens.qseries import eisenstein_qexp

from oracles import elliptic_counts, index_by_cosets, rank_fraction


@pytest.mark.parametrize(
    "N, expected",
    [(1, (1, 1, 1, 1, 0)), (4, (6, 0, 0, 3, 0)), (11, (12, 0, 0, 2, 1))],
)
def test_invariants_examples(N, expected):
    inv = invariants_gamma0(N)
    assert (inv.index, inv.nu2, inv.nu3, inv.cusp_count, inv.genus) == expected


@pytest.mark.parametrize("N", range(1, 61))
def test_index_and_elliptic_points_by_enumeration(N):
    assert index_gamma0(N) == index_by_cosets(N)
    n2, n3 = elliptic_counts(N)
    inv = invariants_gamma0(N)
    assert (inv.nu2, inv.nu3) == (n2, n3)


def test_invariants_reject_bad_level():
    with pytest.raises(ValueError):
        invariants_gamma0(0)


def test_index_gamma1():
    assert [index_gamma1(N) for N in (1, 5, 7)] == [1, 12, 24]
    for N in range(3, 60):
        expected = Fraction(N * N, 2)
        for p in {p for p in range(2, N + 1) if N % p == 0 and all(p % q for q in range(2, p))}:
            expected *= 1 - Fraction(1, p * p)
        assert index_gamma1(N) == expected


def test_has_no_elliptic():
    assert has_no_elliptic_gamma0(11)
    assert not has_no_elliptic_gamma0(5)
    # 12: x^2+1 has no root mod 4 and x^2+x+1 is odd mod 4
    assert has_no_elliptic_gamma0(12) == (elliptic_counts(12) == (0, 0)) is True
    for N in range(1, 501):
        inv = invariants_gamma0(N)
        assert has_no_elliptic_gamma0(N) == (inv.nu2 == 0 and inv.nu3 == 0)


def test_weight_bounds():
    assert weight_bound_complex("Gamma1", 7) == 3
    assert weight_bound_complex("Gamma0", 11) == 6
    assert weight_bound_complex("Gamma0", 49) is None
    assert weight_bound_complex("Gamma0", 5) == 10
    with pytest.raises(ValueError):
        weight_bound_complex("Gamma2", 5)


def test_degree_and_mass():
    assert degree_omega_gamma1(5) == 1 and degree_omega_gamma1(7) == 2
    with pytest.raises(ValueError):
        degree_omega_gamma1(4)
    assert [mass_formula_rhs(p) for p in (5, 13, 23)] == [Fraction(1, 6), Fraction(1, 2), Fraction(11, 12)]


def test_dim_sl2_by_monomial_rank():
    prec = 12
    E4, E6 = eisenstein_qexp(4, 1, prec), eisenstein_qexp(6, 1, prec)
    for k in range(0, 40, 2):
        mons = [list((E4 ** a * E6 ** b).coeffs) for a in range(k // 4 + 1) for b in range(k // 6 + 1) if 4 * a + 6 * b == k]
        assert dim_mk_sl2(k) == (rank_fraction(mons) if mons else 0)
    assert (dim_mk_sl2(12), dim_mk_sl2(2), dim_mk_sl2(0)) == (2, 0, 1)


def test_dim_gamma0_examples():
    assert dim_mk_gamma0(11, 2) == 2
    assert dim_mk_gamma0(1, 12) == 2
    assert dim_mk_gamma0(4, 2) == 2
    assert dim_mk_gamma0(7, 3) == 0
    for k in range(4, 60, 2):
        assert dim_mk_gamma0(1, k) == dim_mk_sl2(k)


def test_dim_star():
    assert dim_mk_star(1, 12) == 2
    assert dim_mk_star(1, 2) == 0
    for k in range(4, 41, 2):
        assert dim_mk_star(1, k) == dim_mk_sl2(k)
    with pytest.raises(ValueError):
        dim_mk_star(4, 12)
    with pytest.raises(ValueError):
        dim_mk_star(5, 3)


def test_sturm():
    assert sturm_bound_gamma0(1, 12) == 2
    assert sturm_bound_gamma0(11, 4) == 5
    assert sturm_bound_gamma0(2, 2) == 2


@pytest.mark.parametrize("N", range(1, 201))
def test_genus_cusps_widths(N):
    inv = invariants_gamma0(N)
    g = 1 + Fraction(inv.index, 12) - Fraction(inv.nu2, 4) - Fraction(inv.nu3, 3) - Fraction(inv.cusp_count, 2)
    assert g.denominator == 1 and g >= 0 and g == inv.genus
    cusps = cusps_gamma0(N)
    assert len(cusps) == inv.cusp_count == sum(totient(gcd(d, N // d)) for d in divisors(N))
    assert sum(c.width for c in cusps) == inv.index
    assert sum(c.is_infinity for c in cusps) == 1
    for c in cusps:
        s = c.denominator
        assert N % s == 0
        assert c.width == N // gcd(s * s, N)
        if c.is_infinity:
            assert (s, c.width) == (N, 1)
