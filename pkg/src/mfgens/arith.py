"""Small integer helpers shared by the curve, eta and linear-algebra modules."""

from __future__ import annotations

from functools import lru_cache
from math import gcd

from sympy import divisors as _divisors
from sympy import factorint, isprime

__all__ = [
    "divisors",
    "prime_factors",
    "is_prime",
    "is_squarefree",
    "totient",
    "kronecker",
    "is_rational_square",
    "egcd",
    "lcm",
]


@lru_cache(maxsize=None)
def divisors(n: int) -> tuple[int, ...]:
    if n < 1:
        raise ValueError(f"divisors of non-positive integer {n}")
    return tuple(_divisors(n))


@lru_cache(maxsize=None)
def _factor(n: int) -> tuple[tuple[int, int], ...]:
    return tuple(sorted(factorint(n).items()))


def factorization(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization of |n| as sorted (p, e) pairs; empty for 0 and ±1."""
    n = abs(n)
    if n <= 1:
        return ()
    return _factor(n)


def prime_factors(n: int) -> tuple[int, ...]:
    return tuple(p for p, _ in factorization(n))


def is_prime(n: int) -> bool:
    return n >= 2 and bool(isprime(n))


def is_squarefree(n: int) -> bool:
    return all(e == 1 for _, e in factorization(n))


def totient(n: int) -> int:
    out = n
    for p, _ in factorization(n):
        out = out // p * (p - 1)
    return out


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a | n) for n >= 1."""
    if n < 1:
        raise ValueError("kronecker symbol needs n >= 1")
    result = 1
    for p, e in factorization(n):
        if p == 2:
            if a % 2 == 0:
                s = 0
            else:
                s = 1 if a % 8 in (1, 7) else -1
        else:
            r = a % p
            if r == 0:
                s = 0
            else:
                s = 1 if pow(r, (p - 1) // 2, p) == 1 else -1
        if s == 0:
            return 0
        if e % 2 == 1:
            result *= s
    return result


def is_rational_square(num: int, den: int = 1) -> bool:
    """True iff num/den is the square of a rational number."""
    if num == 0:
        return True
    if (num < 0) != (den < 0):
        return False
    num, den = abs(num), abs(den)
    g = gcd(num, den)
    num, den = num // g, den // g
    from math import isqrt

    return isqrt(num) ** 2 == num and isqrt(den) ** 2 == den


def egcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with g = gcd(a, b) >= 0 and a*x + b*y = g."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def lcm(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return abs(a * b) // gcd(a, b)
