"""Kernel selection: compiled extension when importable, Python otherwise.

Set ``MFGENS_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

MAX_COMPILED_PRIME = (1 << 31) - 1

try:
    if os.environ.get("MFGENS_PURE_PYTHON"):
        raise ImportError("pure-Python kernels requested")
    from . import _kernels as _compiled  # type: ignore[attr-defined]
except ImportError:
    _compiled = None

BACKEND = "cython" if _compiled is not None else "python"

# primes just below 2**31 used for rank certificates
WORK_PRIMES = (2147483647, 2147483629, 2147483587)


def _reduced(rows, p: int):
    if isinstance(rows, np.ndarray) and rows.dtype != object:
        return rows
    return [[int(x) % p for x in row] for row in rows]


def _pick(p: int):
    if _compiled is not None and p <= MAX_COMPILED_PRIME:
        return _compiled
    return _kernels_py


def mul_trunc_mod(a, b, n: int, p: int):
    if p <= MAX_COMPILED_PRIME:
        if not isinstance(a, np.ndarray):
            a = [int(x) % p for x in a[:n]]
        if not isinstance(b, np.ndarray):
            b = [int(x) % p for x in b[:n]]
    return _pick(p).mul_trunc_mod(a, b, n, p)


def echelon_mod(rows, p: int, stop_at: int = -1):
    if len(rows) == 0:
        return 0, [], []
    return _pick(p).echelon_mod(_reduced(rows, p), p, stop_at)


def rank_mod(rows, p: int) -> int:
    return echelon_mod(rows, p)[0]


def left_kernel_mod(rows, p: int):
    if len(rows) == 0:
        return None
    return _pick(p).left_kernel_mod(_reduced(rows, p), p)
