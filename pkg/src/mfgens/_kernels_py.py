"""Pure-Python versions of the modular-arithmetic kernels.

These mirror ``_kernels.pyx`` one for one and are used when the compiled
extension is unavailable.  They also serve primes too large for the compiled
path (the extension keeps residues below 2**31).
"""

from __future__ import annotations

import numpy as np


def mul_trunc_mod(a, b, n: int, p: int) -> np.ndarray:
    a = [int(x) for x in a[:n]]
    b = [int(x) for x in b[:n]]
    out = [0] * n
    for i, x in enumerate(a):
        if x:
            for j in range(min(len(b), n - i)):
                out[i + j] += x * b[j]
    return np.array([v % p for v in out], dtype=object if p >= 1 << 31 else np.int64)


def echelon_mod(rows, p: int, stop_at: int = -1):
    """Gaussian elimination mod p, scanning rows in order.

    Returns (rank, indices of rows that raised the rank, their pivot
    columns).  Stops early once ``stop_at`` independent rows are found.
    """
    basis: list[list[int]] = []
    pivots: list[int] = []
    picked: list[int] = []
    for idx, row in enumerate(rows):
        v = [int(x) % p for x in row]
        for b, c in zip(basis, pivots):
            t = v[c]
            if t:
                v = [(x - t * y) % p for x, y in zip(v, b)]
        c = next((j for j, x in enumerate(v) if x), -1)
        if c < 0:
            continue
        inv = pow(v[c], -1, p)
        v = [(x * inv) % p for x in v]
        # keep the basis fully reduced so the pivot columns stay clean
        for k, b in enumerate(basis):
            t = b[c]
            if t:
                basis[k] = [(x - t * y) % p for x, y in zip(b, v)]
        basis.append(v)
        pivots.append(c)
        picked.append(idx)
        if len(picked) == stop_at or len(picked) == len(v):
            break
    return len(picked), picked, pivots


def left_kernel_mod(rows, p: int):
    """A nonzero y with y . rows = 0 mod p, or None if the rows are independent."""
    m = len(rows)
    if m == 0:
        return None
    width = len(rows[0])
    # augment each row with its own identity coordinate and eliminate
    aug = [[int(x) % p for x in row] + [1 if i == j else 0 for j in range(m)] for i, row in enumerate(rows)]
    r = 0
    for c in range(width):
        piv = next((i for i in range(r, m) if aug[i][c]), -1)
        if piv < 0:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = pow(aug[r][c], -1, p)
        aug[r] = [(x * inv) % p for x in aug[r]]
        for i in range(m):
            if i != r and aug[i][c]:
                t = aug[i][c]
                aug[i] = [(x - t * y) % p for x, y in zip(aug[i], aug[r])]
        r += 1
        if r == m:
            break
    if r == m:
        return None
    return aug[r][width:]
