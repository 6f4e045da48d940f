from fractions import Fraction
from math import gcd
import random

import pytest

from mfgens.arith import divisors, is_prime
from mfgens.etaforms import (
    EtaQuotient,
    TForm,
    default_tform,
    eta_quotient_qexp,
    min_cuspidal_order,
    newman_check,
    order_at_cusp,
    orders_at_cusps,
    prime_optimal_tform,
    prime_scholl_tform,
    scholl_solve_tform,
    validate_tform,
)
from mfgens.modcurve import cusps_gamma0, index_gamma0
from mfgens.qseries import ZZ, CoeffRing, valuation

from oracles import delta_coeffs, eta_quotient_direct

PRIMES = [5, 7, 11, 13, 17, 19, 23]


def cusp(N, s):
    return next(c for c in cusps_gamma0(N) if c.denominator == s)


def test_eta_qexp_examples():
    D = eta_quotient_qexp(EtaQuotient(1, {1: 24}), 30)
    assert list(D.numerators) == delta_coeffs(30)
    T5 = eta_quotient_qexp(EtaQuotient(5, {5: 10, 1: -2}), 12)
    assert valuation(T5) == 2
    assert list(T5.numerators)[2:5] == [1, 2, 5]
    assert list(T5.numerators)[2:] == eta_quotient_direct({5: 10, 1: -2}, 10)
    with pytest.raises(ValueError, match="24"):
        eta_quotient_qexp(EtaQuotient(2, {1: 1, 2: 1}), 10)


def test_eta_qexp_against_direct_products():
    rng = random.Random(3)
    for _ in range(30):
        N = rng.choice([2, 3, 4, 6, 10, 12])
        ex = {d: rng.randint(-6, 6) for d in divisors(N)}
        E = EtaQuotient(N, ex)
        pre = E.prefactor()
        if pre.denominator != 1 or pre < 0:
            continue
        f = eta_quotient_qexp(E, int(pre) + 15)
        assert list(f.numerators)[int(pre):] == eta_quotient_direct(ex, 15)


def test_order_examples():
    assert order_at_cusp(EtaQuotient(1, {1: 24}), cusp(1, 1)) == 1
    E = EtaQuotient(5, {5: 10, 1: -2})
    assert order_at_cusp(E, cusp(5, 5)) == 2
    assert order_at_cusp(E, cusp(5, 1)) == 0
    assert all(o == 0 for _, o in orders_at_cusps(EtaQuotient(6, {})))


def test_newman_examples():
    assert newman_check(EtaQuotient(5, {1: 30, 5: -30})).ok
    rep = newman_check(EtaQuotient(1, {1: 24}))
    assert not rep.ok and "sum" in rep.failures[0]
    assert not newman_check(EtaQuotient(2, {1: 1, 2: -1})).ok


def test_prime_scholl_examples():
    T = prime_scholl_tform(5)
    assert T.source.nonzero == {1: -6, 5: 30}
    assert (T.weight, T.vanishing_order) == (12, 6)
    T = prime_scholl_tform(13)
    assert T.source.nonzero == {1: -2, 13: 26}
    assert (T.weight, T.vanishing_order) == (12, 14)
    assert (prime_scholl_tform(11).weight, prime_scholl_tform(11).vanishing_order) == (60, 60)
    with pytest.raises(ValueError):
        prime_scholl_tform(9)


def test_prime_optimal_examples():
    got = {p: (prime_optimal_tform(p).weight, prime_optimal_tform(p).vanishing_order) for p in (5, 7, 11)}
    assert got == {5: (4, 2), 7: (6, 4), 11: (10, 10)}


@pytest.mark.parametrize("p", PRIMES)
def test_scholl_agreement_and_optimality(p):
    a, b = prime_scholl_tform(p), scholl_solve_tform(p)
    assert (a.weight, a.vanishing_order) == (b.weight, b.vanishing_order)
    assert prime_optimal_tform(p).weight == p - 1 <= a.weight
    if p % 12 == 11:
        assert a.weight == 6 * (p - 1)
        assert a.weight % ((p - 1) // 2) == 0


@pytest.mark.parametrize("N", [2, 3, 4, 6, 8, 9, 10, 12, 14, 15, 21, 25, 30])
def test_scholl_solve_composite(N):
    T = scholl_solve_tform(N)
    rep = validate_tform(T)
    assert rep.ok, rep.lines()
    for c in cusps_gamma0(N):
        o = order_at_cusp(T.source, c)
        assert o == (T.vanishing_order if c.is_infinity else 0)
    assert T.vanishing_order == Fraction(T.weight * index_gamma0(N), 12)
    assert abs(T.qexp.leading_coefficient()) == 1


def test_validate_catches_corruption():
    good = prime_optimal_tform(5)
    bad_source = EtaQuotient(5, {5: 10, 1: -3})
    bad = TForm(bad_source, 4, 2, good.qexp, ZZ)
    rep = validate_tform(bad)
    assert not rep.ok
    assert not rep.checks["zero away from infinity"] or not rep.checks["integral orders"]
    # unit check depends on the ring
    T = prime_optimal_tform(7)
    doubled = TForm(T.source, T.weight, T.vanishing_order, T.qexp.scale(2), ZZ)
    assert not validate_tform(doubled).checks["unit leading coefficient"]
    assert validate_tform(doubled, CoeffRing.localized(2)).checks["unit leading coefficient"]


def test_order_weight_identity_examples():
    T = prime_optimal_tform(5)
    assert T.vanishing_order == T.weight * 6 // 12 == 2
    T = prime_scholl_tform(11)
    assert T.vanishing_order == T.weight * 12 // 12 == 60


def _min_order_by_search(p):
    # (eta(pz)/eta(z))^a is a modular unit with divisor a(p-1)/24 ((oo) - (0));
    # it needs an integral order and p^a a square
    a = 1
    while True:
        if a % 2 == 0 and (a * (p - 1)) % 24 == 0:
            return a * (p - 1) // 24
        a += 1


@pytest.mark.parametrize("p", [p for p in range(5, 98) if is_prime(p)])
def test_min_cuspidal_order(p):
    assert min_cuspidal_order(p) == _min_order_by_search(p)


def test_min_cuspidal_order_examples():
    assert (min_cuspidal_order(13), min_cuspidal_order(11), min_cuspidal_order(17)) == (1, 5, 4)


def test_valence_for_random_newman_quotients():
    rng = random.Random(11)
    seen = 0
    while seen < 40:
        N = rng.randint(2, 30)
        ex = {d: rng.randint(-8, 8) for d in divisors(N)}
        E = EtaQuotient(N, ex)
        w = E.weight
        if w.denominator != 1:
            continue
        orders = orders_at_cusps(E)
        if any(o.denominator != 1 for _, o in orders):
            continue
        seen += 1
        assert sum(o for _, o in orders) == w * index_gamma0(N) / 12
        pre = E.prefactor()
        if pre >= 0:
            f = eta_quotient_qexp(E, int(pre) + 3)
            assert valuation(f) == next(o for c, o in orders if c.is_infinity)


def test_default_tform():
    assert default_tform(1).vanishing_order == 1
    assert default_tform(11).weight == 10
    assert default_tform(6).weight == 12


def test_prime_scholl_doubles_when_exponent_is_odd():
    # 24 * 17 / gcd(408, 16) = 51 is odd: 17^51 is not a square
    assert newman_check(EtaQuotient(17, {1: 51, 17: -51})).failures == ["product of d^r(d) is not a rational square"]
    T = prime_scholl_tform(17)
    assert T.source.nonzero == {1: -6, 17: 102}
    assert (T.weight, T.vanishing_order) == (48, 72)
    for p in (41, 73):
        assert prime_scholl_tform(p).source.nonzero[1] == -2 * 24 // gcd(24 * p, p - 1)
