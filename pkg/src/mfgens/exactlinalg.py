"""Exact integer and rational linear algebra.

Matrices are plain lists of rows.  HNF and SNF need integer entries; the
rational routines accept ints or Fractions.  All integers are Python ints,
so nothing overflows.

HNF convention: row style, upper triangular echelon, positive pivots, and
entries above each pivot reduced into [0, pivot).
"""

from __future__ import annotations

import random
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

from .arith import egcd, factorization, lcm
from .kernels import WORK_PRIMES, echelon_mod, left_kernel_mod
from .qseries import CoeffRing

__all__ = [
    "identity",
    "matmul",
    "hnf",
    "hnf_basis",
    "pivots",
    "is_hnf",
    "snf",
    "rank",
    "det",
    "rref",
    "solve_rational",
    "saturate",
    "lattice_index",
    "membership_over_ring",
    "RowEchelon",
]

Matrix = list[list[int]]


def _require_integer(M: Sequence[Sequence]) -> None:
    for row in M:
        for x in row:
            if isinstance(x, Fraction):
                if x.denominator != 1:
                    raise ValueError(f"non-integer entry {x}")
            elif not isinstance(x, int):
                raise ValueError(f"non-integer entry {x!r}")


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list[list]:
    if not A:
        return []
    cols = len(B[0]) if B else 0
    return [[sum(a * B[k][j] for k, a in enumerate(row) if a) for j in range(cols)] for row in A]


def _bezout(a: int, b: int) -> tuple[int, int, int]:
    # plain elimination when a already divides b keeps the pivot in place
    if a and b % a == 0:
        return abs(a), (1 if a > 0 else -1), 0
    return egcd(a, b)


def _combine(rows: list[list[int]], i: int, j: int, a: int, b: int, c: int, d: int) -> None:
    # (row_i, row_j) <- (a row_i + b row_j, c row_i + d row_j)
    ri, rj = rows[i], rows[j]
    rows[i] = [a * x + b * y for x, y in zip(ri, rj)]
    rows[j] = [c * x + d * y for x, y in zip(ri, rj)]


def _hnf(M: Sequence[Sequence[int]], track: bool) -> tuple[Matrix, Optional[Matrix]]:
    _require_integer(M)
    H = [[int(x) for x in row] for row in M]
    m = len(H)
    n = len(H[0]) if m else 0
    U = identity(m) if track else None
    r = 0
    for c in range(n):
        if r == m:
            break
        for i in range(r + 1, m):
            b = H[i][c]
            if b == 0:
                continue
            a = H[r][c]
            if a == 0:
                H[r], H[i] = H[i], H[r]
                if track:
                    U[r], U[i] = U[i], U[r]
                continue
            g, x, y = _bezout(a, b)
            _combine(H, r, i, x, y, -b // g, a // g)
            if track:
                _combine(U, r, i, x, y, -b // g, a // g)
        p = H[r][c]
        if p == 0:
            continue
        if p < 0:
            H[r] = [-x for x in H[r]]
            if track:
                U[r] = [-x for x in U[r]]
            p = -p
        for k in range(r):
            q = H[k][c] // p
            if q:
                H[k] = [x - q * y for x, y in zip(H[k], H[r])]
                if track:
                    U[k] = [x - q * y for x, y in zip(U[k], U[r])]
        r += 1
    return H, U


def hnf(M: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix]:
    """Row Hermite normal form: returns (H, U) with H = U M, |det U| = 1."""
    H, U = _hnf(M, True)
    return H, U


def hnf_basis(rows: Sequence[Sequence[int]]) -> Matrix:
    """Nonzero rows of the HNF: the canonical basis of the lattice spanned."""
    H, _ = _hnf(rows, False)
    return [row for row in H if any(row)]


def pivots(H: Sequence[Sequence[int]]) -> list[tuple[int, int]]:
    """(column, value) of the leading entry of each nonzero row."""
    out = []
    for row in H:
        c = next((j for j, x in enumerate(row) if x), None)
        if c is not None:
            out.append((c, row[c]))
    return out


def is_hnf(H: Sequence[Sequence[int]]) -> bool:
    last = -1
    seen_zero = False
    pivots = []
    for row in H:
        c = next((j for j, x in enumerate(row) if x), None)
        if c is None:
            seen_zero = True
            continue
        if seen_zero or c <= last or row[c] < 0:
            return False
        pivots.append((len(pivots), c))
        last = c
    for r, c in pivots:
        p = H[r][c]
        for k in range(r):
            if not 0 <= H[k][c] < p:
                return False
    return True


def snf(M: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, Matrix]:
    """Smith normal form: returns (D, U, V) with D = U M V diagonal.

    The nonzero diagonal entries are positive and form a divisibility chain.
    """
    _require_integer(M)
    D = [[int(x) for x in row] for row in M]
    m = len(D)
    n = len(D[0]) if m else 0
    U = identity(m)
    V = identity(n)

    def col_op(i: int, j: int, a: int, b: int, c: int, d: int) -> None:
        # (col_i, col_j) <- (a col_i + b col_j, c col_i + d col_j)
        for X in (D, V):
            for row in X:
                x, y = row[i], row[j]
                row[i], row[j] = a * x + b * y, c * x + d * y

    t = 0
    while t < min(m, n):
        # smallest nonzero entry in the trailing block becomes the pivot
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if D[i][j] and (best is None or abs(D[i][j]) < abs(D[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        D[t], D[i] = D[i], D[t]
        U[t], U[i] = U[i], U[t]
        col_op(t, j, 0, 1, 1, 0)
        done = False
        while not done:
            done = True
            for i in range(t + 1, m):
                b = D[i][t]
                if b:
                    a = D[t][t]
                    g, x, y = _bezout(a, b)
                    _combine(D, t, i, x, y, -b // g, a // g)
                    _combine(U, t, i, x, y, -b // g, a // g)
            for j in range(t + 1, n):
                b = D[t][j]
                if b:
                    a = D[t][t]
                    g, x, y = _bezout(a, b)
                    col_op(t, j, x, y, -b // g, a // g)
                    done = False
            if done:
                p = D[t][t]
                for i in range(t + 1, m):
                    for j in range(t + 1, n):
                        if D[i][j] % p:
                            # fold the offending row into the pivot row
                            D[t] = [x + y for x, y in zip(D[t], D[i])]
                            U[t] = [x + y for x, y in zip(U[t], U[i])]
                            done = False
                            break
                    if not done:
                        break
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return D, U, V


def _to_fractions(M: Sequence[Sequence]) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in M]


def _primitive_int_rows(M: Sequence[Sequence]) -> list[list[int]]:
    out = []
    for row in M:
        fr = [Fraction(x) for x in row]
        den = 1
        for x in fr:
            den = lcm(den, x.denominator)
        out.append([int(x * den) for x in fr])
    return out


class RowEchelon:
    """Incremental echelon basis of integer row vectors over Q.

    Rows are kept primitive; ``reduce`` returns the remainder of a vector
    after clearing every pivot column, scaled by a nonzero integer.
    Optionally tracks each stored row as a combination of inserted vectors.
    """

    def __init__(self, width: int, track: bool = False) -> None:
        self.width = width
        self.rows: list[list[int]] = []
        self.pivots: list[int] = []
        self.track = track
        self.combos: list[list[Fraction]] = []
        self.count = 0

    def __len__(self) -> int:
        return len(self.rows)

    def _reduce(self, v: list[int], combo: Optional[list[Fraction]]):
        for row, c, rc in zip(self.rows, self.pivots, self.combos if self.track else [None] * len(self.rows)):
            t = v[c]
            if t:
                a = row[c]
                g = gcd(a, t)
                fa, ft = a // g, t // g
                v = [fa * x - ft * y for x, y in zip(v, row)]
                if combo is not None:
                    combo = [fa * x - ft * y for x, y in zip(combo, rc)]
        return v, combo

    def reduce(self, v: Sequence[int]) -> list[int]:
        return self._reduce(list(v), None)[0]

    def contains(self, v: Sequence[int]) -> bool:
        return not any(self.reduce(v))

    def add(self, v: Sequence[int]) -> bool:
        """Insert v; returns True when it raised the rank."""
        idx = self.count
        self.count += 1
        combo = None
        if self.track:
            for rc in self.combos:
                rc.append(Fraction(0))
            combo = [Fraction(0)] * self.count
            combo[idx] = Fraction(1)
        v, combo = self._reduce(list(v), combo)
        c = next((j for j, x in enumerate(v) if x), None)
        if c is None:
            return False
        g = 0
        for x in v:
            g = gcd(g, x)
        if v[c] < 0:
            g = -g
        v = [x // g for x in v]
        if combo is not None:
            combo = [x / g for x in combo]
        self.rows.append(v)
        self.pivots.append(c)
        if self.track:
            self.combos.append(combo)
        return True

    def solve(self, v: Sequence) -> Optional[list[Fraction]]:
        """Coefficients expressing v in the inserted vectors, or None."""
        if not self.track:
            raise ValueError("solve needs track=True")
        rem = [Fraction(x) for x in v]
        coeffs = [Fraction(0)] * self.count
        for row, c, rc in zip(self.rows, self.pivots, self.combos):
            t = rem[c]
            if t:
                f = t / row[c]
                rem = [x - f * y for x, y in zip(rem, row)]
                for i, y in enumerate(rc):
                    if y:
                        coeffs[i] += f * y
        if any(rem):
            return None
        return coeffs


def rank(M: Sequence[Sequence]) -> int:
    if not M:
        return 0
    ech = RowEchelon(len(M[0]))
    for row in _primitive_int_rows(M):
        ech.add(row)
    return len(ech)


def det(M: Sequence[Sequence[int]]) -> int:
    """Determinant of a square integer matrix (Bareiss)."""
    A = [[int(x) for x in row] for row in M]
    n = len(A)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k]), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        akk = A[k][k]
        for i in range(k + 1, n):
            aik = A[i][k]
            row_i, row_k = A[i], A[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * A[n - 1][n - 1]


def rref(M: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q (nonzero rows) and pivot columns."""
    A = _to_fractions(M)
    m = len(A)
    n = len(A[0]) if m else 0
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(m):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return A[:r], pivots


def solve_rational(v: Sequence, gens: Sequence[Sequence]) -> Optional[list[Fraction]]:
    """Some c with sum c_i gens_i = v over Q (free variables set to 0), or None."""
    if not gens:
        return [] if not any(v) else None
    ech = RowEchelon(len(v), track=True)
    for g in _primitive_int_rows(gens):
        ech.add(g)
    # rescale: _primitive_int_rows multiplied each generator by its denominator
    coeffs = ech.solve(v)
    if coeffs is None:
        return None
    out = []
    for c, g in zip(coeffs, gens):
        den = 1
        for x in g:
            den = lcm(den, Fraction(x).denominator)
        out.append(c * den)
    return out


# --------------------------------------------------------------------------
# lattices


def _independent_rows(G: list[list[int]]) -> list[list[int]]:
    if not G:
        return []
    ech = RowEchelon(len(G[0]))
    return [g for g in G if ech.add(g)]


def _minor_gcd(G: list[list[int]], tries: int = 4) -> int:
    """gcd of a few nonzero maximal minors of the full-row-rank matrix G."""
    d = len(G)
    n = len(G[0])
    rng = random.Random(d * 1000003 + n)
    cols_seen = set()
    g = 0
    prime = WORK_PRIMES[0]
    for attempt in range(tries * 3):
        order = list(range(n))
        if attempt:
            rng.shuffle(order)
        shuffled = [[row[j] for j in order] for row in G]
        # pivot columns of the transpose pick d independent columns
        cols_t = [list(c) for c in zip(*shuffled)]
        r, picked, _ = echelon_mod(cols_t, prime)
        if r < d:
            # unlucky prime for this order; fall back to exact choice
            ech = RowEchelon(d)
            picked = [i for i, c in enumerate(cols_t) if ech.add(c)]
        cols = tuple(sorted(order[i] for i in picked[:d]))
        if cols in cols_seen:
            continue
        cols_seen.add(cols)
        g = gcd(g, det([[row[j] for j in cols] for row in G]))
        if g == 1 or len(cols_seen) >= tries:
            break
    return abs(g)


def lattice_index(gens: Sequence[Sequence]) -> int:
    """Index of the Z-span of independent integer rows in its saturation."""
    G = _independent_rows(_primitive_int_rows(gens))
    if not G:
        return 1
    return _saturate_rows(G)[1]


def _saturate_rows(G: list[list[int]]) -> tuple[list[list[int]], int]:
    d = len(G)
    D = _minor_gcd(G)
    if D == 0:
        raise ArithmeticError("rows are not independent")
    index = 1
    if D == 1:
        return G, 1
    G = [row[:] for row in G]
    for ell, _ in factorization(D):
        while True:
            y = left_kernel_mod(G, ell)
            if y is None:
                break
            i = next(k for k, x in enumerate(y) if x % ell)
            inv = pow(y[i], -1, ell)
            y = [(x * inv) % ell for x in y]
            new = [sum(y[k] * G[k][j] for k in range(d)) for j in range(len(G[0]))]
            if any(x % ell for x in new):
                raise ArithmeticError("kernel vector mod ell did not give a divisible combination")
            G[i] = [x // ell for x in new]
            index *= ell
    return G, index


def saturate(gens: Sequence[Sequence]) -> list[list[int]]:
    """Z-basis (in HNF) of (Q-span of gens) intersected with Z^n."""
    G = _independent_rows(_primitive_int_rows(gens))
    if not G:
        return []
    S, _ = _saturate_rows(G)
    H, _ = hnf(S)
    return [row for row in H if any(row)]


def _coeff_in_ring(x: Fraction, ring: CoeffRing) -> bool:
    return ring.admits(x)


def membership_over_ring(
    v: Sequence, gens: Sequence[Sequence], ring: CoeffRing
) -> Optional[list[Fraction]]:
    """Coefficients c in ``ring`` with v = sum c_i gens_i, or None.

    Over Q this is plain linear algebra.  Over Z or Z[1/M] the generators
    are replaced by a Z-basis of the lattice they span (the nonzero rows of
    their HNF); v lies in the ring-span exactly when its (unique) coordinates
    in that basis lie in the ring, because the ring-span of the lattice basis
    equals the ring-span of the generators.
    """
    n = len(v)
    for g in gens:
        if len(g) != n:
            raise ValueError(f"dimension mismatch: {len(g)} != {n}")
    if ring.kind == "Q":
        return solve_rational(v, gens)
    if not gens:
        return [] if not any(Fraction(x) for x in v) else None
    # clear denominators uniformly; coefficients are unchanged
    den = 1
    for row in list(gens) + [v]:
        for x in row:
            den = lcm(den, Fraction(x).denominator)
    G = [[int(Fraction(x) * den) for x in row] for row in gens]
    w = [int(Fraction(x) * den) for x in v]
    H, U = hnf(G)
    basis = [(h, u) for h, u in zip(H, U) if any(h)]
    coords: list[Fraction] = []
    rem = [Fraction(x) for x in w]
    for h, _ in basis:
        c = next(j for j, x in enumerate(h) if x)
        a = rem[c] / h[c]
        coords.append(a)
        if a:
            rem = [x - a * y for x, y in zip(rem, h)]
    if any(rem):
        return None
    if not all(_coeff_in_ring(a, ring) for a in coords):
        return None
    out = [Fraction(0)] * len(G)
    for a, (_, u) in zip(coords, basis):
        if a:
            for i, x in enumerate(u):
                if x:
                    out[i] += a * x
    return out
