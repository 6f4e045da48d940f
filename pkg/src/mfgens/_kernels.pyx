# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled modular-arithmetic kernels (residues below 2**31)."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t

cnp.import_array()


cdef inline int64_t _inv(int64_t a, int64_t p):
    cdef int64_t t = 0, nt = 1, r = p, nr = a % p, q, tmp
    if nr < 0:
        nr += p
    while nr:
        q = r // nr
        tmp = t - q * nt
        t = nt
        nt = tmp
        tmp = r - q * nr
        r = nr
        nr = tmp
    if t < 0:
        t += p
    return t


def mul_trunc_mod(a, b, Py_ssize_t n, int64_t p):
    cdef int64_t[::1] av = np.ascontiguousarray(np.asarray(a[:n], dtype=np.int64) % p)
    cdef int64_t[::1] bv = np.ascontiguousarray(np.asarray(b[:n], dtype=np.int64) % p)
    out_arr = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] out = out_arr
    cdef Py_ssize_t i, j, la = av.shape[0], lb = bv.shape[0], hi
    cdef int64_t x
    for i in range(la):
        x = av[i]
        if x == 0:
            continue
        hi = n - i
        if hi > lb:
            hi = lb
        for j in range(hi):
            out[i + j] = (out[i + j] + x * bv[j]) % p
    return out_arr


def echelon_mod(rows, int64_t p, Py_ssize_t stop_at=-1):
    """Gaussian elimination mod p, scanning rows in order.

    Returns (rank, indices of rows that raised the rank, their pivot columns).
    """
    arr = np.ascontiguousarray(np.asarray(rows, dtype=np.int64) % p)
    if arr.ndim != 2 or arr.shape[0] == 0:
        return 0, [], []
    cdef int64_t[:, ::1] M = arr
    cdef Py_ssize_t m = M.shape[0], w = M.shape[1]
    basis_arr = np.zeros((min(m, w), w), dtype=np.int64)
    cdef int64_t[:, ::1] B = basis_arr
    v_arr = np.zeros(w, dtype=np.int64)
    cdef int64_t[::1] v = v_arr
    cdef Py_ssize_t[::1] piv = np.zeros(min(m, w), dtype=np.intp)
    cdef Py_ssize_t rank = 0, idx, k, j, c
    cdef int64_t t, inv
    picked = []
    pivcols = []
    for idx in range(m):
        for j in range(w):
            v[j] = M[idx, j]
        for k in range(rank):
            t = v[piv[k]]
            if t:
                for j in range(w):
                    v[j] = (v[j] - t * B[k, j]) % p
                    if v[j] < 0:
                        v[j] += p
        c = -1
        for j in range(w):
            if v[j]:
                c = j
                break
        if c < 0:
            continue
        inv = _inv(v[c], p)
        for j in range(w):
            v[j] = (v[j] * inv) % p
        for k in range(rank):
            t = B[k, c]
            if t:
                for j in range(w):
                    B[k, j] = (B[k, j] - t * v[j]) % p
                    if B[k, j] < 0:
                        B[k, j] += p
        for j in range(w):
            B[rank, j] = v[j]
        piv[rank] = c
        rank += 1
        picked.append(idx)
        pivcols.append(c)
        if rank == stop_at or rank == w:
            break
    return rank, picked, pivcols


def left_kernel_mod(rows, int64_t p):
    """A nonzero y with y . rows = 0 mod p, or None if the rows are independent."""
    arr = np.asarray(rows, dtype=np.int64) % p
    if arr.ndim != 2 or arr.shape[0] == 0:
        return None
    cdef Py_ssize_t m = arr.shape[0], w = arr.shape[1]
    cdef Py_ssize_t r = 0, c, i, j, pr
    aug_arr = np.zeros((m, w + m), dtype=np.int64)
    aug_arr[:, :w] = arr
    aug_arr[:, w:] = np.eye(m, dtype=np.int64)
    cdef int64_t[:, ::1] A = aug_arr
    cdef int64_t inv, t, tmp
    for c in range(w):
        pr = -1
        for i in range(r, m):
            if A[i, c]:
                pr = i
                break
        if pr < 0:
            continue
        if pr != r:
            for j in range(w + m):
                tmp = A[r, j]
                A[r, j] = A[pr, j]
                A[pr, j] = tmp
        inv = _inv(A[r, c], p)
        for j in range(w + m):
            A[r, j] = (A[r, j] * inv) % p
        for i in range(m):
            if i != r and A[i, c]:
                t = A[i, c]
                for j in range(w + m):
                    A[i, j] = (A[i, j] - t * A[r, j]) % p
                    if A[i, j] < 0:
                        A[i, j] += p
        r += 1
        if r == m:
            break
    if r == m:
        return None
    return [int(x) for x in aug_arr[r, w:]]
