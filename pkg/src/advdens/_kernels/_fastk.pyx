# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled cosine-series kernels.

cos(pi k x) for k = 0..band is generated per sample with the Chebyshev
three-term recurrence (two flops per entry instead of a libm call), fused
with the accumulation so no (n, band+1) feature matrix is materialised.

Determinism: sample sums are accumulated into a fixed number of chunk
partials (independent of thread count) and reduced in index order by the
caller, so results do not depend on OpenMP scheduling.
"""

import numpy as np

cimport numpy as cnp
from cython.parallel cimport prange
from libc.math cimport cos

cnp.import_array()

cdef double PI = 3.141592653589793238462643383279502884
cdef double SQRT2 = 1.414213562373095048801688724209698079

N_CHUNKS = 64


def coeff_partials_1d(const double[::1] x, Py_ssize_t band, Py_ssize_t nchunks):
    """Chunked partial sums of [psi_k(x_j)]; shape (nchunks, band+1)."""
    cdef Py_ssize_t n = x.shape[0]
    out_arr = np.zeros((nchunks, band + 1))
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t c, j, k, lo, hi
    cdef double base, prev, cur, nxt
    with nogil:
        for c in prange(nchunks, schedule="static"):
            lo = c * n // nchunks
            hi = (c + 1) * n // nchunks
            for j in range(lo, hi):
                base = 2.0 * cos(PI * x[j])
                prev = 1.0
                out[c, 0] += 1.0
                if band >= 1:
                    cur = 0.5 * base
                    out[c, 1] += SQRT2 * cur
                    for k in range(2, band + 1):
                        nxt = base * cur - prev
                        out[c, k] += SQRT2 * nxt
                        prev = cur
                        cur = nxt
    return out_arr


def coeff_partials_2d(const double[:, ::1] pts, Py_ssize_t band, Py_ssize_t nchunks):
    """Chunked partial sums of psi_a(x1) psi_b(x2); shape (nchunks, B, B)."""
    cdef Py_ssize_t n = pts.shape[0]
    cdef Py_ssize_t nb = band + 1
    out_arr = np.zeros((nchunks, nb, nb))
    scratch_arr = np.empty((nchunks, 2, nb))
    cdef double[:, :, ::1] out = out_arr
    cdef double[:, :, ::1] sc = scratch_arr
    cdef Py_ssize_t c, j, a, b, lo, hi
    cdef double base, prev, cur, nxt, fa
    with nogil:
        for c in prange(nchunks, schedule="static"):
            lo = c * n // nchunks
            hi = (c + 1) * n // nchunks
            for j in range(lo, hi):
                for a in range(2):
                    base = 2.0 * cos(PI * pts[j, a])
                    prev = 1.0
                    sc[c, a, 0] = 1.0
                    if band >= 1:
                        cur = 0.5 * base
                        sc[c, a, 1] = SQRT2 * cur
                        for b in range(2, nb):
                            nxt = base * cur - prev
                            sc[c, a, b] = SQRT2 * nxt
                            prev = cur
                            cur = nxt
                for a in range(nb):
                    fa = sc[c, 0, a]
                    for b in range(nb):
                        out[c, a, b] += fa * sc[c, 1, b]
    return out_arr


def eval_series_1d(const double[::1] coeffs, const double[::1] x):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t band = coeffs.shape[0] - 1
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t j, k
    cdef double base, prev, cur, nxt, acc
    with nogil:
        for j in prange(n, schedule="static"):
            base = 2.0 * cos(PI * x[j])
            acc = coeffs[0]
            if band >= 1:
                prev = 1.0
                cur = 0.5 * base
                acc = acc + SQRT2 * cur * coeffs[1]
                for k in range(2, band + 1):
                    nxt = base * cur - prev
                    acc = acc + SQRT2 * nxt * coeffs[k]
                    prev = cur
                    cur = nxt
            out[j] = acc
    return out_arr


def eval_series_2d(const double[:, ::1] coeffs, const double[:, ::1] pts, Py_ssize_t nchunks):
    cdef Py_ssize_t n = pts.shape[0]
    cdef Py_ssize_t nb = coeffs.shape[0]
    cdef Py_ssize_t band = nb - 1
    out_arr = np.empty(n)
    scratch_arr = np.empty((nchunks, 2, nb))
    cdef double[::1] out = out_arr
    cdef double[:, :, ::1] sc = scratch_arr
    cdef Py_ssize_t c, j, a, b, lo, hi
    cdef double base, prev, cur, nxt, acc, fa
    with nogil:
        for c in prange(nchunks, schedule="static"):
            lo = c * n // nchunks
            hi = (c + 1) * n // nchunks
            for j in range(lo, hi):
                for a in range(2):
                    base = 2.0 * cos(PI * pts[j, a])
                    prev = 1.0
                    sc[c, a, 0] = 1.0
                    if band >= 1:
                        cur = 0.5 * base
                        sc[c, a, 1] = SQRT2 * cur
                        for b in range(2, nb):
                            nxt = base * cur - prev
                            sc[c, a, b] = SQRT2 * nxt
                            prev = cur
                            cur = nxt
                acc = 0.0
                for a in range(nb):
                    fa = sc[c, 0, a]
                    for b in range(nb):
                        acc = acc + fa * coeffs[a, b] * sc[c, 1, b]
                out[j] = acc
    return out_arr
