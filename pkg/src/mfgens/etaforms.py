"""Eta quotients on Gamma0(N): expansions, cusp orders, and T-forms.

A T-form is a modular form that vanishes only at infinity and whose
q-expansion has a unit leading coefficient.  Dividing by one reduces weight,
which is what makes the generator search terminate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Mapping, Optional

from .arith import divisors, is_prime, is_rational_square, lcm
from .exactlinalg import solve_rational
from .modcurve import CuspData, cusps_gamma0, index_gamma0, sturm_bound_gamma0
from .qseries import ZZ, CoeffRing, QExpansion, eta_product, valuation

__all__ = [
    "EtaQuotient",
    "TForm",
    "TFormReport",
    "NewmanReport",
    "eta_quotient_qexp",
    "order_at_cusp",
    "orders_at_cusps",
    "newman_check",
    "scholl_solve_tform",
    "prime_scholl_tform",
    "prime_optimal_tform",
    "validate_tform",
    "min_cuspidal_order",
    "default_tform",
]


@dataclass(frozen=True)
class EtaQuotient:
    """prod_{d | N} eta(dz)^{r(d)}; missing divisors have exponent 0."""

    level: int
    exponents: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.level < 1:
            raise ValueError(f"level must be positive, got {self.level}")
        full = {d: 0 for d in divisors(self.level)}
        for d, r in dict(self.exponents).items():
            if d not in full:
                raise ValueError(f"{d} does not divide {self.level}")
            full[d] = int(r)
        object.__setattr__(self, "exponents", full)

    def __hash__(self) -> int:
        return hash((self.level, tuple(sorted(self.exponents.items()))))

    @property
    def weight(self) -> Fraction:
        return Fraction(sum(self.exponents.values()), 2)

    @property
    def nonzero(self) -> dict[int, int]:
        return {d: r for d, r in self.exponents.items() if r}

    def prefactor(self) -> Fraction:
        """Exponent of q in front of the product, sum d r(d) / 24."""
        return Fraction(sum(d * r for d, r in self.exponents.items()), 24)

    def __mul__(self, other: "EtaQuotient") -> "EtaQuotient":
        N = lcm(self.level, other.level)
        ex = {d: 0 for d in divisors(N)}
        for src in (self, other):
            for d, r in src.exponents.items():
                ex[d] += r
        return EtaQuotient(N, ex)

    def __pow__(self, e: int) -> "EtaQuotient":
        return EtaQuotient(self.level, {d: e * r for d, r in self.exponents.items()})

    def inverse(self) -> "EtaQuotient":
        return self**-1

    def __str__(self) -> str:
        parts = [f"eta({d}z)^{r}" if d > 1 else f"eta(z)^{r}" for d, r in sorted(self.nonzero.items())]
        return " * ".join(parts) if parts else "1"


def eta_quotient_qexp(E: EtaQuotient, prec: int, ring: CoeffRing = ZZ) -> QExpansion:
    """q-expansion to absolute precision ``prec``; the prefactor must be integral."""
    pre = E.prefactor()
    if pre.denominator != 1:
        residue = sum(d * r for d, r in E.exponents.items()) % 24
        raise ValueError(f"prefactor {pre} is not an integer (sum d*r(d) = {residue} mod 24)")
    if pre < 0:
        raise ValueError(f"negative prefactor {pre}: not holomorphic at infinity")
    return eta_product(E.nonzero, prec, ring)


def _check_cusp(N: int, c: CuspData) -> None:
    s = c.denominator
    if N % s or c.width != N // gcd(s * s, N):
        raise ValueError(f"cusp {c} (width {c.width}) is not a cusp of Gamma0({N})")


def order_at_cusp(E: EtaQuotient, c: CuspData) -> Fraction:
    """Order in the local parameter at c: sum_d r(d) t gcd(d, s)^2 / (24 d)."""
    _check_cusp(E.level, c)
    s, t = c.denominator, c.width
    return sum((Fraction(r * t * gcd(d, s) ** 2, 24 * d) for d, r in E.exponents.items()), Fraction(0))


def orders_at_cusps(E: EtaQuotient) -> list[tuple[CuspData, Fraction]]:
    return [(c, order_at_cusp(E, c)) for c in cusps_gamma0(E.level)]


@dataclass
class NewmanReport:
    ok: bool
    failures: list[str]

    def __bool__(self) -> bool:
        return self.ok


def newman_check(E: EtaQuotient) -> NewmanReport:
    """Sufficient conditions for E to be a modular function on Gamma0(N)."""
    failures = []
    total = sum(E.exponents.values())
    if total != 0:
        failures.append(f"exponent sum is {total}, not 0")
    num = den = 1
    for d, r in E.exponents.items():
        if r > 0:
            num *= d**r
        elif r < 0:
            den *= d ** (-r)
    if not is_rational_square(num, den):
        failures.append("product of d^r(d) is not a rational square")
    bad = [str(c) for c, o in orders_at_cusps(E) if o.denominator != 1]
    if bad:
        failures.append("non-integral order at cusps " + ", ".join(bad))
    return NewmanReport(not failures, failures)


# --------------------------------------------------------------------------
# T-forms


@dataclass(frozen=True)
class TForm:
    source: EtaQuotient
    weight: int
    vanishing_order: int
    qexp: QExpansion
    ring: CoeffRing

    @property
    def level(self) -> int:
        return self.source.level

    def expansion(self, prec: int, ring: Optional[CoeffRing] = None) -> QExpansion:
        return eta_quotient_qexp(self.source, prec, ring or self.ring)


@dataclass
class TFormReport:
    checks: dict[str, bool]
    messages: list[str]

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def __bool__(self) -> bool:
        return self.ok

    def lines(self) -> list[str]:
        out = [f"{name}: {'ok' if passed else 'FAILED'}" for name, passed in self.checks.items()]
        return out + self.messages


def _certification_prec(N: int, w: int, r: int) -> int:
    return r + sturm_bound_gamma0(N, w)


def _make_tform(E: EtaQuotient, ring: CoeffRing = ZZ, prec: Optional[int] = None) -> TForm:
    w = E.weight
    if w.denominator != 1 or w <= 0:
        raise ValueError(f"weight {w} is not a positive integer")
    pre = E.prefactor()
    if pre.denominator != 1:
        raise ValueError(f"order at infinity {pre} is not integral")
    w, r = int(w), int(pre)
    if prec is None:
        prec = _certification_prec(E.level, w, r)
    qexp = eta_quotient_qexp(E, prec, ZZ).retag(ring)
    return TForm(E, w, r, qexp, ring)


def validate_tform(T: TForm, ring: Optional[CoeffRing] = None) -> TFormReport:
    """Certify that T is a T-form on Gamma0(N) over ``ring``."""
    ring = ring or T.ring
    E = T.source
    N = E.level
    checks: dict[str, bool] = {}
    msgs: list[str] = []

    orders = orders_at_cusps(E)
    away = [(c, o) for c, o in orders if not c.is_infinity]
    checks["zero away from infinity"] = all(o == 0 for _, o in away)
    if not checks["zero away from infinity"]:
        msgs.append("orders: " + ", ".join(f"{c}:{o}" for c, o in away if o != 0))

    checks["integral orders"] = all(o.denominator == 1 for _, o in orders)

    num = den = 1
    for d, r in E.exponents.items():
        if r > 0:
            num *= d**r
        elif r < 0:
            den *= d ** (-r)
    w = E.weight
    checks["modular weight"] = w.denominator == 1 and w > 0 and int(w) == T.weight and T.weight % 2 == 0
    checks["square condition"] = is_rational_square(num, den)

    lead = T.qexp.leading_coefficient()
    checks["unit leading coefficient"] = lead != 0 and ring.is_unit(lead)
    if not checks["unit leading coefficient"]:
        msgs.append(f"leading coefficient {lead} is not a unit in {ring}")

    val = valuation(T.qexp)
    inf_order = next(o for c, o in orders if c.is_infinity)
    checks["valuation"] = val == T.vanishing_order == inf_order
    if not checks["valuation"]:
        msgs.append(f"valuation {val}, claimed {T.vanishing_order}, order at infinity {inf_order}")

    total = sum((o for _, o in orders), Fraction(0))
    expected = Fraction(T.weight * index_gamma0(N), 12)
    checks["valence total"] = total == expected
    if not checks["valence total"]:
        msgs.append(f"sum of cusp orders {total} != w*index/12 = {expected}")
    return TFormReport(checks, msgs)


def _certified(T: TForm) -> TForm:
    rep = validate_tform(T)
    if not rep.ok:
        raise ArithmeticError("T-form failed certification: " + "; ".join(rep.lines()))
    return T


def scholl_solve_tform(N: int, ring: CoeffRing = ZZ) -> TForm:
    """T = Delta^m / f with f an eta quotient of weight 0 cancelling Delta^m away from infinity.

    f must have order m t at every cusp of width t other than infinity, hence
    order -m (index - 1) at infinity.  Writing r(d) = m x(d) gives one linear
    equation per cusp denominator s:
        sum_d gcd(d, s)^2 x(d) / d = 24            (s != N)
        sum_d gcd(d, N)^2 x(d) / d = -24 (index-1)  (s = N)
    m is the least positive integer making every r(d) integral, doubled if
    prod d^r(d) is not a square.
    """
    if N < 2:
        raise ValueError("need N >= 2 (level 1 uses Delta itself)")
    divs = divisors(N)
    idx = index_gamma0(N)
    rows = []
    rhs = []
    for s in divs:
        rows.append([Fraction(gcd(d, s) ** 2, d) for d in divs])
        rhs.append(Fraction(-24 * (idx - 1)) if s == N else Fraction(24))
    # solve A x = rhs: columns of A are the generators
    cols = [[rows[i][j] for i in range(len(divs))] for j in range(len(divs))]
    x = solve_rational(rhs, cols)
    if x is None:
        raise ArithmeticError(f"cusp system at level {N} is inconsistent")
    m = 1
    for v in x:
        m = lcm(m, v.denominator)
    r = {d: int(m * v) for d, v in zip(divs, x)}
    f = EtaQuotient(N, r)
    if not newman_check(f).ok:
        m *= 2
        f = EtaQuotient(N, {d: 2 * v for d, v in r.items()})
        rep = newman_check(f)
        if not rep.ok:
            raise ArithmeticError(f"eta quotient at level {N} fails: {rep.failures}")
    delta_m = EtaQuotient(N, {1: 24 * m})
    T = _make_tform(delta_m * f.inverse(), ring)
    return _certified(T)


def _require_prime(p: int) -> None:
    if not is_prime(p) or p < 5:
        raise ValueError(f"{p} is not a prime >= 5")


def prime_scholl_tform(p: int, ring: CoeffRing = ZZ) -> TForm:
    """(eta(pz)^p / eta(z))^e with e = 24 / gcd(24p, p - 1).

    When 8 | p - 1 the exponent 24p / gcd(24p, p - 1) is odd, and the square
    condition forces e to double (p = 17, 41, 73, ...).
    """
    _require_prime(p)
    g = gcd(24 * p, p - 1)
    e = 24 // g
    if (24 * p // g) % 2:
        e *= 2
    return _certified(_make_tform(EtaQuotient(p, {p: p * e, 1: -e}), ring))


def prime_optimal_tform(p: int, ring: CoeffRing = ZZ) -> TForm:
    """(eta(pz)^p / eta(z))^2: weight p - 1, order (p^2 - 1)/12 at infinity."""
    _require_prime(p)
    return _certified(_make_tform(EtaQuotient(p, {p: 2 * p, 1: -2}), ring))


def min_cuspidal_order(p: int) -> int:
    """Least r with r((oo) - (0)) principal on X0(p)."""
    _require_prime(p)
    return (p - 1) // {1: 12, 5: 4, 7: 6, 11: 2}[p % 12]


def default_tform(N: int, ring: CoeffRing = ZZ) -> TForm:
    """Delta at level 1, the optimal form at primes >= 5, Scholl's otherwise."""
    if N == 1:
        return _certified(_make_tform(EtaQuotient(1, {1: 24}), ring))
    if is_prime(N) and N >= 5:
        return prime_optimal_tform(N, ring)
    return scholl_solve_tform(N, ring)
