"""Closed-form invariants of Gamma0(N) and Gamma1(N).

Everything here is exact integer / rational arithmetic.  The cusp list of
Gamma0(N) is the input for eta-quotient orders in :mod:`mfgens.etaforms`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional

from .arith import divisors, factorization, is_prime, is_squarefree, kronecker, totient

__all__ = [
    "CuspData",
    "CurveInvariants",
    "index_gamma0",
    "nu2_gamma0",
    "nu3_gamma0",
    "cusp_count_gamma0",
    "cusps_gamma0",
    "invariants_gamma0",
    "index_gamma1",
    "has_no_elliptic_gamma0",
    "weight_bound_complex",
    "degree_omega_gamma1",
    "mass_formula_rhs",
    "dim_mk_sl2",
    "dim_mk_gamma0",
    "dim_mk_star",
    "sturm_bound_gamma0",
]


@dataclass(frozen=True)
class CuspData:
    """A cusp r/s of Gamma0(N) with its width t."""

    numerator: int
    denominator: int
    width: int
    is_infinity: bool = False

    def __str__(self) -> str:
        if self.is_infinity:
            return "oo"
        return f"{self.numerator}/{self.denominator}"


@dataclass(frozen=True)
class CurveInvariants:
    level: int
    index: int
    nu2: int
    nu3: int
    cusp_count: int
    genus: int


def _check_level(N: int) -> None:
    if not isinstance(N, int) or N < 1:
        raise ValueError(f"level must be a positive integer, got {N!r}")


def index_gamma0(N: int) -> int:
    """[SL2(Z) : Gamma0(N)] = N prod_{p|N} (1 + 1/p)."""
    _check_level(N)
    out = N
    for p, _ in factorization(N):
        out = out // p * (p + 1)
    return out


def nu2_gamma0(N: int) -> int:
    _check_level(N)
    if N % 4 == 0:
        return 0
    out = 1
    for p, _ in factorization(N):
        out *= 1 + kronecker(-4, p)
    return out


def nu3_gamma0(N: int) -> int:
    _check_level(N)
    if N % 9 == 0:
        return 0
    out = 1
    for p, _ in factorization(N):
        out *= 1 + kronecker(-3, p)
    return out


def cusp_count_gamma0(N: int) -> int:
    _check_level(N)
    return sum(totient(gcd(d, N // d)) for d in divisors(N))


def cusps_gamma0(N: int) -> list[CuspData]:
    """Cusp representatives a/s, one per class, ordered by s then a.

    Infinity comes last as 1/N with width 1.  For each s | N the classes are
    indexed by units a mod gcd(s, N/s); the stored numerator is the least
    positive lift of a that is coprime to s (0/1 for the cusp 0).
    """
    _check_level(N)
    out: list[CuspData] = []
    for s in divisors(N):
        g = gcd(s, N // s)
        width = N // gcd(s * s, N)
        for a in range(g):
            if gcd(a, g) != 1:
                continue
            if s == 1:
                num = 0
            else:
                num = a if a > 0 else g
                while gcd(num, s) != 1:
                    num += g
            out.append(CuspData(num, s, width, is_infinity=(s == N)))
    return out


def invariants_gamma0(N: int) -> CurveInvariants:
    idx = index_gamma0(N)
    n2, n3, c = nu2_gamma0(N), nu3_gamma0(N), cusp_count_gamma0(N)
    genus = 1 + Fraction(idx, 12) - Fraction(n2, 4) - Fraction(n3, 3) - Fraction(c, 2)
    if genus.denominator != 1 or genus < 0:
        raise ArithmeticError(f"genus formula gave {genus} at level {N}")
    return CurveInvariants(N, idx, n2, n3, c, int(genus))


def index_gamma1(N: int) -> int:
    """[SL2(Z) : Gamma1(N)], counting +-1 together for N >= 3."""
    _check_level(N)
    if N == 1:
        return 1
    if N == 2:
        return 3
    sq = N * N
    for p, _ in factorization(N):
        sq = sq // (p * p) * (p * p - 1)
    return sq // 2


def has_no_elliptic_gamma0(N: int) -> bool:
    """Gamma0(N) is free of elliptic elements.

    Equivalent to nu2 = nu3 = 0: (4 | N or some p = 3 mod 4 divides N) and
    (9 | N or some p = 2 mod 3 divides N).  Note p = 2 counts in the second
    clause since (-3 | 2) = -1.
    """
    _check_level(N)
    primes = [p for p, _ in factorization(N)]
    no_order2 = N % 4 == 0 or any(p % 4 == 3 for p in primes)
    no_order3 = N % 9 == 0 or any(p % 3 == 2 for p in primes)
    return no_order2 and no_order3


def weight_bound_complex(group: str, N: int) -> Optional[int]:
    """Proven weight bound for generating M(group(N), C), or None.

    ``group`` is "Gamma0" or "Gamma1".
    """
    _check_level(N)
    if group == "Gamma1":
        return 3 if N >= 5 else None
    if group != "Gamma0":
        raise ValueError(f"unknown group {group!r}")
    if has_no_elliptic_gamma0(N):
        return 6
    if is_squarefree(N):
        return 10
    return None


def degree_omega_gamma1(N: int) -> Fraction:
    if N < 5:
        raise ValueError("degree of omega on X1(N) needs N >= 5")
    return Fraction(index_gamma1(N), 12)


def mass_formula_rhs(p: int) -> Fraction:
    """Right-hand side (p - 1)/24 of the Eichler-Deuring mass formula."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p < 5:
        raise ValueError("mass formula value is only used for p >= 5")
    return Fraction(p - 1, 24)


def dim_mk_sl2(k: int) -> int:
    if k < 0 or k % 2:
        return 0
    if k % 12 == 2:
        return k // 12
    return k // 12 + 1


def dim_mk_gamma0(N: int, k: int) -> int:
    """dim M_k(Gamma0(N)).  Odd weights give 0 since -1 is in Gamma0(N)."""
    if k < 0 or k % 2:
        return 0
    if k == 0:
        return 1
    inv = invariants_gamma0(N)
    if k == 2:
        return inv.genus + inv.cusp_count - 1
    return (
        (k - 1) * (inv.genus - 1)
        + (k // 2) * inv.cusp_count
        + inv.nu2 * (k // 4)
        + inv.nu3 * (k // 3)
    )


def dim_mk_star(N: int, k: int) -> int:
    """Dimension of the Boecherer-Nebe subspace M_k(N)* for squarefree N.

    The symbols are evaluated as Kronecker symbols.  For even N the
    expression is not integral; that case raises ValueError.
    """
    _check_level(N)
    if not is_squarefree(N):
        raise ValueError(f"{N} is not squarefree")
    if k < 2 or k % 2:
        raise ValueError("weight must be even and >= 2")
    n = (k - 1) * N
    value = (
        Fraction(n, 12)
        + Fraction(1, 2)
        - Fraction(kronecker(-1, n), 4)
        - Fraction(kronecker(-3, n), 3)
    )
    if value.denominator != 1:
        raise ValueError(f"dimension formula is not integral at N={N}, k={k}: {value}")
    return int(value)


def sturm_bound_gamma0(N: int, k: int) -> int:
    """Number of leading coefficients that determine a weight-k form on Gamma0(N)."""
    if k < 1:
        raise ValueError("weight must be >= 1")
    idx = index_gamma0(N)
    return -((-k * idx) // 12) + 1
