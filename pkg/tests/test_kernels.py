import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mfgens import _kernels_py, kernels
from mfgens.qseries import mul_trunc

from oracles import rank_fraction

try:
    from mfgens import _kernels as compiled
except ImportError:  # extension not built
    compiled = None

P = kernels.WORK_PRIMES[0]
backends = [_kernels_py] + ([compiled] if compiled is not None else [])


@pytest.mark.parametrize("mod", backends, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-10**6, 10**6), min_size=1, max_size=30),
       st.lists(st.integers(-10**6, 10**6), min_size=1, max_size=30))
def test_mul_trunc_mod_matches_exact(mod, a, b):
    n = min(len(a), len(b))
    got = mod.mul_trunc_mod(np.array([x % P for x in a[:n]], dtype=np.int64),
                            np.array([x % P for x in b[:n]], dtype=np.int64), n, P)
    assert [int(x) for x in got] == [x % P for x in mul_trunc(a, b, n)]


@pytest.mark.parametrize("mod", backends, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(-50, 50), min_size=5, max_size=5), min_size=1, max_size=7))
def test_echelon_rank_matches_rational_rank(mod, rows):
    # entries are tiny, so rank mod a 31-bit prime equals the rational rank
    arr = np.array([[x % P for x in r] for r in rows], dtype=np.int64)
    rank, picked, pivcols = mod.echelon_mod(arr, P, -1)
    assert rank == rank_fraction(rows) == len(picked) == len(pivcols)
    assert rank_fraction([rows[i] for i in picked]) == rank


@pytest.mark.parametrize("mod", backends, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_left_kernel(mod):
    rows = np.array([[1, 2, 3], [2, 4, 6], [0, 1, 1]], dtype=np.int64)
    # returns one nonzero vector of the left kernel, or None when it is trivial
    K = np.asarray(mod.left_kernel_mod(rows, 7), dtype=np.int64)
    assert K.any() and not ((K @ rows) % 7).any()
    assert mod.left_kernel_mod(np.eye(3, dtype=np.int64), 7) is None


@pytest.mark.skipif(compiled is None, reason="compiled kernels not built")
def test_backends_agree_on_large_input():
    rng = np.random.default_rng(1)
    A = rng.integers(0, P, size=(40, 80), dtype=np.int64)
    assert compiled.echelon_mod(A, P, -1) == _kernels_py.echelon_mod(A, P, -1)


def test_fallback_selected_by_environment():
    env = dict(os.environ, MFGENS_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from mfgens import kernels; print(kernels.BACKEND)"],
                         capture_output=True, text=True, env=env, check=True)
    assert out.stdout.strip() == "python"
