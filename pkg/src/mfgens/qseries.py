"""Truncated q-expansions with exact rational coefficients.

A :class:`QExpansion` stores integer numerators and one positive common
denominator, so arithmetic runs on Python ints.  The attached
:class:`CoeffRing` is a contract: every constructor and operation checks that
the coefficients are admissible in it.

Series may carry a fractional prefactor ``q^(shift/24)`` while eta products
are assembled; whole multiples of 24 are folded into the coefficient list
whenever the result stays a power series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence, Union

from .arith import lcm, prime_factors
from .modcurve import dim_mk_sl2

__all__ = [
    "CoeffRing",
    "ZZ",
    "QQ",
    "RingError",
    "ShiftError",
    "QExpansion",
    "qexp_add",
    "qexp_mul",
    "qexp_div_unit",
    "valuation",
    "mul_trunc",
    "eta_product",
    "sigma",
    "bernoulli",
    "eisenstein_qexp",
    "weight2_eisenstein",
    "u_operator",
    "delta_qexp",
    "victor_miller_basis",
]

Number = Union[int, Fraction]


class RingError(ValueError):
    """A coefficient, unit or ring combination is not admissible."""


class ShiftError(ValueError):
    """Fractional q-power prefactors that do not line up."""


@dataclass(frozen=True)
class CoeffRing:
    """Z, Z[1/M] or Q.  ``M`` is only meaningful for the localized kind."""

    kind: str
    M: int = 1

    def __post_init__(self) -> None:
        if self.kind not in ("Z", "Z[1/M]", "Q"):
            raise ValueError(f"unknown ring kind {self.kind!r}")
        if self.M < 1:
            raise ValueError("M must be a positive integer")
        if self.kind != "Z[1/M]" and self.M != 1:
            raise ValueError("M only applies to Z[1/M]")

    @classmethod
    def integers(cls) -> "CoeffRing":
        return cls("Z")

    @classmethod
    def localized(cls, M: int) -> "CoeffRing":
        return cls("Z[1/M]", M)

    @classmethod
    def rationals(cls) -> "CoeffRing":
        return cls("Q")

    @classmethod
    def parse(cls, text: str, level: int | None = None) -> "CoeffRing":
        """Parse ``Z``, ``Q``, ``Z/1_M`` or ``Z/1_6N`` (needs ``level``)."""
        t = text.strip()
        if t == "Z":
            return cls.integers()
        if t == "Q":
            return cls.rationals()
        if t.startswith("Z/1_"):
            arg = t[4:]
            if arg == "6N":
                if level is None:
                    raise ValueError("Z/1_6N needs a level")
                return cls.localized(6 * level)
            if arg.isdigit() and int(arg) >= 1:
                return cls.localized(int(arg))
        raise ValueError(f"cannot parse ring {text!r}")

    def __str__(self) -> str:
        if self.kind == "Z[1/M]":
            return f"Z/1_{self.M}"
        return self.kind

    @property
    def primes(self) -> tuple[int, ...]:
        """Primes inverted in the ring (empty for Z; meaningless for Q)."""
        return prime_factors(self.M) if self.kind == "Z[1/M]" else ()

    def _den_ok(self, den: int) -> bool:
        if self.kind == "Q":
            return True
        den = abs(den)
        if self.kind == "Z":
            return den == 1
        g = gcd(den, self.M)
        while g > 1:
            den //= g
            g = gcd(den, self.M)
        return den == 1

    def admits(self, x: Number) -> bool:
        return self._den_ok(Fraction(x).denominator)

    def is_unit(self, x: Number) -> bool:
        x = Fraction(x)
        if x == 0:
            return False
        if self.kind == "Q":
            return True
        return self._den_ok(x.denominator) and self._den_ok(x.numerator)

    def offending_prime(self, x: Number) -> int | None:
        """A prime that keeps x from being a unit, if any."""
        x = Fraction(x)
        if x == 0:
            return 0
        for part in (x.numerator, x.denominator):
            for p in prime_factors(part):
                if self.kind == "Z" or (self.kind == "Z[1/M]" and self.M % p):
                    return p
        return None

    def contains(self, other: "CoeffRing") -> bool:
        if self.kind == "Q":
            return True
        if other.kind == "Q":
            return False
        return all(self.M % p == 0 for p in other.primes)

    def unify(self, other: "CoeffRing") -> "CoeffRing":
        """Smallest ring containing both."""
        if self.contains(other):
            return self
        if other.contains(self):
            return other
        return CoeffRing.localized(lcm(self.M, other.M))


ZZ = CoeffRing.integers()
QQ = CoeffRing.rationals()


# --------------------------------------------------------------------------
# integer polynomial kernels

def mul_trunc(a: Sequence[int], b: Sequence[int], n: int) -> list[int]:
    """First n coefficients of a*b for integer coefficient lists.

    Uses Kronecker substitution so the work happens inside one big-integer
    product.
    """
    a = list(a[:n])
    b = list(b[:n])
    while a and a[-1] == 0:
        a.pop()
    while b and b[-1] == 0:
        b.pop()
    if not a or not b:
        return [0] * n
    if len(a) < 8 or len(b) < 8:
        out = [0] * n
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b[: n - i]):
                    out[i + j] += x * y
        return out
    bound = max(map(abs, a)) * max(map(abs, b)) * min(len(a), len(b))
    bits = bound.bit_length() + 2
    big = _pack(a, bits) * _pack(b, bits)
    out = _unpack(big, bits, min(n, len(a) + len(b) - 1))
    out.extend([0] * (n - len(out)))
    return out


def _pack(coeffs: list[int], bits: int) -> int:
    # Signed digits: evaluate the polynomial at 2**bits.
    acc = 0
    for c in reversed(coeffs):
        acc = (acc << bits) + c
    return acc


def _unpack(value: int, bits: int, count: int) -> list[int]:
    mask = (1 << bits) - 1
    half = 1 << (bits - 1)
    out = []
    for _ in range(count):
        d = value & mask
        if d >= half:
            d -= 1 << bits
        out.append(d)
        value = (value - d) >> bits
    return out


def _inverse_unit_int(a: list[int], n: int) -> list[int]:
    """Inverse of an integer series with constant term +-1, to n terms."""
    a0 = a[0]
    if a0 not in (1, -1):
        raise RingError("constant term is not +-1")
    inv = [a0]
    prec = 1
    while prec < n:
        prec = min(2 * prec, n)
        # Newton step: inv <- inv * (2 - a*inv)
        e = mul_trunc(a, inv, prec)
        e = [-x for x in e]
        e[0] += 2
        inv = mul_trunc(inv, e, prec)
    return inv[:n]


def _pow_int(a: list[int], e: int, n: int) -> list[int]:
    if e < 0:
        a = _inverse_unit_int(a, n)
        e = -e
    result = [1] + [0] * (n - 1)
    base = a[:n] + [0] * max(0, n - len(a))
    while e:
        if e & 1:
            result = mul_trunc(result, base, n)
        e >>= 1
        if e:
            base = mul_trunc(base, base, n)
    return result


# --------------------------------------------------------------------------
# QExpansion


class QExpansion:
    """Immutable truncated q-expansion q^(shift/24) * sum_{n < prec} c_n q^n."""

    __slots__ = ("_num", "_den", "ring", "shift")

    def __init__(
        self,
        coeffs: Iterable[Number],
        ring: CoeffRing = QQ,
        shift: int = 0,
        *,
        _den: int | None = None,
    ) -> None:
        if _den is None:
            fr = [Fraction(c) for c in coeffs]
            den = 1
            for c in fr:
                den = lcm(den, c.denominator)
            num = [c.numerator * (den // c.denominator) for c in fr]
        else:
            num = list(coeffs)
            den = _den
        if not num:
            raise ValueError("a q-expansion needs prec > 0")
        g = den
        for x in num:
            if g == 1:
                break
            g = gcd(g, x)
        if g > 1:
            num = [x // g for x in num]
            den //= g
        # fold whole powers of q into the coefficient list
        if shift >= 24:
            whole = shift // 24
            num = [0] * whole + num
            shift -= 24 * whole
        self._num = tuple(num)
        self._den = den
        self.ring = ring
        self.shift = shift
        if not ring._den_ok(den):
            bad = ring.offending_prime(Fraction(1, den))
            raise RingError(f"coefficient denominator {den} not admissible in {ring} (prime {bad})")

    # construction helpers
    @classmethod
    def from_ints(cls, num: Sequence[int], ring: CoeffRing = ZZ, den: int = 1, shift: int = 0) -> "QExpansion":
        return cls(num, ring, shift, _den=den)

    @classmethod
    def one(cls, prec: int, ring: CoeffRing = ZZ) -> "QExpansion":
        return cls.from_ints([1] + [0] * (prec - 1), ring)

    @classmethod
    def zero(cls, prec: int, ring: CoeffRing = ZZ) -> "QExpansion":
        return cls.from_ints([0] * prec, ring)

    @classmethod
    def monomial(cls, n: int, prec: int, ring: CoeffRing = ZZ) -> "QExpansion":
        c = [0] * prec
        if n < prec:
            c[n] = 1
        return cls.from_ints(c, ring)

    # accessors
    @property
    def prec(self) -> int:
        return len(self._num)

    @property
    def numerators(self) -> tuple[int, ...]:
        return self._num

    @property
    def denominator(self) -> int:
        return self._den

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(x, self._den) for x in self._num)

    def __getitem__(self, n: int) -> Fraction:
        return Fraction(self._num[n], self._den)

    def __len__(self) -> int:
        return len(self._num)

    def is_integral(self) -> bool:
        return self._den == 1

    def leading_coefficient(self) -> Fraction:
        for x in self._num:
            if x:
                return Fraction(x, self._den)
        return Fraction(0)

    def __repr__(self) -> str:
        return f"QExpansion({self.to_string(6)}, ring={self.ring}, prec={self.prec})"

    def to_string(self, terms: int = 8) -> str:
        parts = []
        shown = 0
        for n, c in enumerate(self.coeffs):
            if shown >= terms:
                break
            if c == 0:
                continue
            shown += 1
            e = Fraction(n) + Fraction(self.shift, 24)
            mono = "" if e == 0 else ("q" if e == 1 else f"q^{e}")
            if mono and abs(c) == 1:
                term = ("-" if c < 0 else "+") + mono
            else:
                term = ("-" if c < 0 else "+") + str(abs(c)) + mono
            parts.append(term)
        body = " ".join(parts).lstrip("+") if parts else "0"
        return f"{body} + O(q^{Fraction(self.prec) + Fraction(self.shift, 24)})"

    # equality up to the common precision
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QExpansion):
            return NotImplemented
        if self.shift != other.shift:
            return False
        n = min(self.prec, other.prec)
        return all(x * other._den == y * self._den for x, y in zip(self._num[:n], other._num[:n]))

    def __hash__(self) -> int:
        return hash((self.shift, self.coeffs))

    # ring handling
    def retag(self, ring: CoeffRing) -> "QExpansion":
        return QExpansion(self._num, ring, self.shift, _den=self._den)

    def truncate(self, prec: int) -> "QExpansion":
        if prec > self.prec:
            raise ValueError(f"cannot extend precision {self.prec} to {prec}")
        return QExpansion(self._num[:prec], self.ring, self.shift, _den=self._den)

    def scale(self, c: Number) -> "QExpansion":
        c = Fraction(c)
        ring = self.ring
        if not ring.admits(c):
            ring = ring.unify(_ring_of(c))
        return QExpansion(
            [x * c.numerator for x in self._num], ring, self.shift, _den=self._den * c.denominator
        )

    def __neg__(self) -> "QExpansion":
        return QExpansion([-x for x in self._num], self.ring, self.shift, _den=self._den)

    def __add__(self, other: "QExpansion") -> "QExpansion":
        return qexp_add(self, other)

    def __sub__(self, other: "QExpansion") -> "QExpansion":
        return qexp_add(self, -other)

    def __mul__(self, other: Union["QExpansion", Number]) -> "QExpansion":
        if isinstance(other, QExpansion):
            return qexp_mul(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def __truediv__(self, other: Union["QExpansion", Number]) -> "QExpansion":
        if isinstance(other, QExpansion):
            return qexp_div_unit(self, other)
        return self.scale(1 / Fraction(other))

    def __pow__(self, e: int) -> "QExpansion":
        if e < 0:
            return QExpansion.one(self.prec, self.ring) / (self ** (-e))
        if self.shift % 24:
            raise ShiftError("powers of fractional-shift series are assembled by eta_product")
        num = _pow_int(list(self._num), e, self.prec)
        return QExpansion(num, self.ring, 0, _den=self._den ** e)

    def substitute(self, d: int) -> "QExpansion":
        """f(q) -> f(q^d); precision scales by d."""
        if d < 1:
            raise ValueError("substitution needs d >= 1")
        out = [0] * (self.prec * d)
        out[::d] = self._num
        return QExpansion(out, self.ring, self.shift * d, _den=self._den)


def _ring_of(c: Fraction) -> CoeffRing:
    if c.denominator == 1:
        return ZZ
    return CoeffRing.localized(c.denominator)


def _align(a: QExpansion, b: QExpansion) -> tuple[list[int], list[int], int, int]:
    """Bring two series to the same shift; returns numerators, shift, prec."""
    if (a.shift - b.shift) % 24:
        raise ShiftError(f"incompatible fractional shifts {a.shift}/24 and {b.shift}/24")
    an, bn = list(a.numerators), list(b.numerators)
    shift = min(a.shift, b.shift)
    if a.shift > shift:
        j = (a.shift - shift) // 24
        an = [0] * j + an
    if b.shift > shift:
        j = (b.shift - shift) // 24
        bn = [0] * j + bn
    return an, bn, shift, min(len(an), len(bn))


def qexp_add(a: QExpansion, b: QExpansion) -> QExpansion:
    an, bn, shift, prec = _align(a, b)
    den = lcm(a.denominator, b.denominator)
    fa, fb = den // a.denominator, den // b.denominator
    num = [x * fa + y * fb for x, y in zip(an[:prec], bn[:prec])]
    return QExpansion(num, a.ring.unify(b.ring), shift, _den=den)


def qexp_mul(a: QExpansion, b: QExpansion) -> QExpansion:
    prec = min(a.prec, b.prec)
    num = mul_trunc(a.numerators, b.numerators, prec)
    return QExpansion(num, a.ring.unify(b.ring), a.shift + b.shift, _den=a.denominator * b.denominator)


def valuation(a: QExpansion) -> Union[int, Fraction, float]:
    """Order at infinity; math.inf when every known coefficient vanishes."""
    for n, x in enumerate(a.numerators):
        if x:
            v = Fraction(n) + Fraction(a.shift, 24)
            return int(v) if v.denominator == 1 else v
    return math.inf


def _first_nonzero(num: Sequence[int]) -> int | None:
    for n, x in enumerate(num):
        if x:
            return n
    return None


def qexp_div_unit(a: QExpansion, b: QExpansion) -> QExpansion:
    """a / b where the leading coefficient of b is a unit of the ring."""
    ring = a.ring.unify(b.ring)
    vb = _first_nonzero(b.numerators)
    if vb is None:
        raise ZeroDivisionError("division by a series that vanishes to its precision")
    lead = Fraction(b.numerators[vb], b.denominator)
    if not ring.is_unit(lead):
        raise RingError(
            f"leading coefficient {lead} is not a unit in {ring} (prime {ring.offending_prime(lead)})"
        )
    va = _first_nonzero(a.numerators)
    shift = a.shift - b.shift
    if va is None:
        prec = max(1, a.prec - vb)
        return QExpansion.from_ints([0] * prec, ring, 1, shift)
    rel = min(a.prec - va, b.prec - vb)
    top = list(a.numerators[va : va + rel])
    bot = list(b.numerators[vb : vb + rel])
    # (top/den_a) / (bot/den_b) = den_b * top * (1/bot) / den_a
    inv_num, inv_den = _inverse_scaled(bot, rel)
    q_num = [x * b.denominator for x in mul_trunc(top, inv_num, rel)]
    den = a.denominator * inv_den
    lead_shift = va - vb
    if lead_shift < 0:
        shift += 24 * lead_shift
        lead_shift = 0
    out = [0] * lead_shift + q_num
    return QExpansion(out, ring, shift, _den=den)


def _inverse_scaled(bot: list[int], n: int) -> tuple[list[int], int]:
    """Return (num, den) with num/den = 1/(sum bot_i q^i) to n terms."""
    c = bot[0]
    if c in (1, -1):
        return _inverse_unit_int(bot, n), 1
    inv = [Fraction(1, c)]
    for k in range(1, n):
        s = sum(bot[i] * inv[k - i] for i in range(1, min(k, len(bot) - 1) + 1))
        inv.append(-s / c)
    den = 1
    for x in inv:
        den = lcm(den, x.denominator)
    return [int(x * den) for x in inv], den


# --------------------------------------------------------------------------
# classical series


@lru_cache(maxsize=64)
def _euler_product(prec: int) -> tuple[int, ...]:
    """prod_{n>=1} (1 - q^n) by the pentagonal number theorem."""
    out = [0] * prec
    k = 0
    while True:
        sign = -1 if k % 2 else 1
        hit = False
        for m in ((k * (3 * k - 1)) // 2, (k * (3 * k + 1)) // 2) if k else (0,):
            if m < prec:
                out[m] += sign
                hit = True
        if not hit and k > 0:
            break
        k += 1
    return tuple(out)


def eta_product(exponents: dict[int, int], prec: int, ring: CoeffRing = ZZ) -> QExpansion:
    """Expansion of prod_d eta(dz)^{r_d}; the shift records sum d r_d / 24.

    When the prefactor is a non-negative whole power of q the result is
    known exactly modulo q^prec.
    """
    shift = sum(d * r for d, r in exponents.items())
    if shift >= 0 and shift % 24 == 0:
        prec = max(1, prec - shift // 24)
    total = [1] + [0] * (prec - 1)
    for d, r in sorted(exponents.items()):
        if r == 0:
            continue
        base_len = -(-prec // d)
        base = list(_euler_product(base_len))
        powered = _pow_int(base, r, base_len)
        sub = [0] * prec
        for i, x in enumerate(powered):
            if i * d < prec:
                sub[i * d] = x
        total = mul_trunc(total, sub, prec)
    return QExpansion.from_ints(total, ring, shift=shift)


def delta_qexp(prec: int) -> QExpansion:
    """Delta = eta(z)^24 = q - 24 q^2 + ..."""
    return eta_product({1: 24}, prec)


def sigma(n: int, k: int) -> int:
    s = 0
    i = 1
    while i * i <= n:
        if n % i == 0:
            s += i**k
            j = n // i
            if j != i:
                s += j**k
        i += 1
    return s


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """Bernoulli number B_n with B_1 = -1/2."""
    from math import comb

    B = [Fraction(1)]
    for m in range(1, n + 1):
        B.append(-sum(comb(m + 1, j) * B[j] for j in range(m)) / (m + 1))
    return B[n]


def _sigma_table(k: int, n: int) -> list[int]:
    """sigma_k(m) for 0 <= m < n by a divisor sieve (entry 0 unused)."""
    out = [0] * n
    for d in range(1, n):
        p = d**k
        for m in range(d, n, d):
            out[m] += p
    return out


def eisenstein_qexp(k: int, d: int, prec: int) -> QExpansion:
    """E_k(dz) normalized with constant term 1."""
    if k < 2 or k % 2:
        raise ValueError(f"Eisenstein series needs even k >= 2, got {k}")
    if d < 1:
        raise ValueError("d must be positive")
    c = -Fraction(2 * k) / bernoulli(k)
    base_len = -(-prec // d)
    sig = _sigma_table(k - 1, base_len)
    vals = [Fraction(1)] + [c * s for s in sig[1:]]
    out: list[Fraction] = [Fraction(0)] * prec
    for i, v in enumerate(vals):
        if i * d < prec:
            out[i * d] = v
    ring = ZZ if c.denominator == 1 else QQ
    return QExpansion(out, ring)


def weight2_eisenstein(d: int, prec: int, integral: bool = False) -> QExpansion:
    """Holomorphic weight-2 form on Gamma0(d) built from E2.

    Default: (d E2(dz) - E2(z)) / (d - 1), constant term 1, coefficients in
    Z[1/(d-1)].  With ``integral=True`` the undivided d E2(dz) - E2(z) is
    returned (constant term d - 1, integral coefficients).
    """
    if d <= 1:
        raise ValueError("weight2_eisenstein needs d > 1")
    sig = _sigma_table(1, prec)
    out = [0] * prec
    out[0] = d - 1
    for n in range(1, prec):
        out[n] += 24 * sig[n]
        if n % d == 0:
            out[n] -= 24 * d * sig[n // d]
    if integral:
        return QExpansion.from_ints(out, ZZ)
    ring = CoeffRing.localized(d - 1) if d > 2 else ZZ
    return QExpansion.from_ints(out, ring, den=d - 1)


def u_operator(f: QExpansion, p: int) -> QExpansion:
    if p < 1:
        raise ValueError("U_p needs p >= 1")
    if f.shift % 24:
        raise ShiftError("U_p is only defined on integral-power series")
    prec = -(-f.prec // p)
    return QExpansion.from_ints(list(f.numerators[::p])[:prec], f.ring, f.denominator)


# Victor-Miller: for weight k with m = dim M_k(SL2(Z)), the residual weight
# k - 12(m-1) is one of these, realised by E4^a E6^b.
_VM_BASE = {0: (0, 0), 4: (1, 0), 6: (0, 1), 8: (2, 0), 10: (1, 1), 14: (2, 1)}


@lru_cache(maxsize=128)
def victor_miller_basis(k: int, prec: int) -> tuple[QExpansion, ...]:
    """Integral echelon basis f_0..f_{m-1} of M_k(SL2(Z)), f_i = q^i + O(q^m).

    Every leading coefficient is 1, so the Q-echelon form is already a
    Z-basis; there is no separate integral variant to choose.
    """
    if k % 2 or k < 4:
        raise ValueError(f"Victor-Miller basis needs even k >= 4, got {k}")
    m = dim_mk_sl2(k)
    base_w = k - 12 * (m - 1)
    a, b = _VM_BASE[base_w]
    work = max(prec, m)
    E4 = eisenstein_qexp(4, 1, work)
    E6 = eisenstein_qexp(6, 1, work)
    D = delta_qexp(work)
    base = E4**a * E6**b
    E6sq = E6 * E6
    gens = []
    for j in range(m):
        gens.append(D**j * E6sq ** (m - 1 - j) * base)
    # reduce upwards so that f_i has zero coefficients at q^j, j != i, j < m
    for i in range(m - 1, -1, -1):
        f = gens[i]
        for j in range(i + 1, m):
            c = f[j]
            if c:
                f = f - gens[j].scale(c)
        gens[i] = f
    return tuple(g.truncate(prec) if g.prec > prec else g for g in gens)
