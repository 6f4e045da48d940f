"""Compare the compiled kernels with the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 3]

Both backends are imported directly, so no environment switch is needed.
Each kernel is first checked for identical output, then timed.
"""

from __future__ import annotations

import argparse
import sys
import timeit

import numpy as np

from mfgens import _kernels_py
from mfgens.kernels import WORK_PRIMES

try:
    from mfgens import _kernels as _compiled
except ImportError:
    _compiled = None

P = WORK_PRIMES[0]


def random_rows(n_rows, n_cols, p, rank=None, seed=0):
    rng = np.random.default_rng(seed)
    if rank is None:
        return rng.integers(0, p, size=(n_rows, n_cols), dtype=np.int64)
    # low-rank matrix built from a rank-r product reduced mod p
    a = rng.integers(0, 50, size=(n_rows, rank), dtype=np.int64)
    b = rng.integers(0, 50, size=(rank, n_cols), dtype=np.int64)
    return (a @ b) % p


def cases():
    yield "mul_trunc_mod n=2000", "mul_trunc_mod", lambda: (
        np.array(random_rows(1, 2000, P, seed=1)[0]), np.array(random_rows(1, 2000, P, seed=2)[0]), 2000, P)
    yield "mul_trunc_mod n=8000", "mul_trunc_mod", lambda: (
        np.array(random_rows(1, 8000, P, seed=3)[0]), np.array(random_rows(1, 8000, P, seed=4)[0]), 8000, P)
    yield "echelon_mod 60x300", "echelon_mod", lambda: (random_rows(60, 300, P, seed=5), P, -1)
    yield "echelon_mod 150x400 rank 90", "echelon_mod", lambda: (random_rows(150, 400, P, rank=90, seed=6), P, -1)
    yield "left_kernel_mod 80x60", "left_kernel_mod", lambda: (random_rows(80, 60, P, seed=7), P)


def _same(x, y):
    if isinstance(x, tuple):
        return all(_same(a, b) for a, b in zip(x, y))
    if x is None or y is None:
        return x is y
    return np.array_equal(np.asarray(x, dtype=object), np.asarray(y, dtype=object))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if _compiled is None:
        print("compiled kernels not built; only the Python backend is available", file=sys.stderr)
    print(f"{'kernel':<32} {'python [s]':>11} {'cython [s]':>11} {'speedup':>8}")
    mismatches = 0
    for label, name, make in cases():
        argset = make()
        py_fn = getattr(_kernels_py, name)
        t_py = min(timeit.repeat(lambda: py_fn(*argset), number=1, repeat=args.repeat))
        if _compiled is None:
            print(f"{label:<32} {t_py:>11.4f} {'-':>11} {'-':>8}")
            continue
        c_fn = getattr(_compiled, name)
        if not _same(py_fn(*argset), c_fn(*argset)):
            mismatches += 1
            print(f"{label}: backends disagree", file=sys.stderr)
        t_c = min(timeit.repeat(lambda: c_fn(*argset), number=1, repeat=args.repeat))
        print(f"{label:<32} {t_py:>11.4f} {t_c:>11.4f} {t_py / t_c:>7.1f}x")
    return 1 if mismatches else 0


if __name__ == "__main__":
    sys.exit(main())
