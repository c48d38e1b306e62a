# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops. Must stay bit-identical to ``_pykernels``.

Every accumulation below is written in the same order as the numpy
fallback; the extension is built with ``-ffp-contract=off`` so no
fused multiply-add changes the rounding.
"""

import numpy as np

from libc.math cimport floor


def convolve_edge(const double[::1] x, const double[::1] w):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t m = w.shape[0]
    cdef Py_ssize_t r = m // 2
    cdef Py_ssize_t i, k
    cdef double wk
    out = np.zeros(n, dtype=np.float64)
    if n == 0:
        return out
    cdef double[::1] o = out
    # edge-replicated copy so the tap loop below has no branches
    padded_arr = np.empty(n + 2 * r, dtype=np.float64)
    cdef double[::1] padded = padded_arr
    with nogil:
        for i in range(r):
            padded[i] = x[0]
            padded[r + n + i] = x[n - 1]
        for i in range(n):
            padded[r + i] = x[i]
        for k in range(m):
            wk = w[k]
            for i in range(n):
                o[i] = o[i] + wk * padded[i + k]
    return out


def gather_nearest(const unsigned char[:, :] src,
                   const Py_ssize_t[::1] rows,
                   const Py_ssize_t[::1] cols):
    cdef Py_ssize_t oh = rows.shape[0]
    cdef Py_ssize_t ow = cols.shape[0]
    cdef Py_ssize_t i, j, ri
    out = np.empty((oh, ow), dtype=np.uint8)
    cdef unsigned char[:, ::1] o = out
    with nogil:
        for i in range(oh):
            ri = rows[i]
            for j in range(ow):
                o[i, j] = src[ri, cols[j]]
    return out


def gather_bilinear(const unsigned char[:, :] src,
                    const Py_ssize_t[::1] r0, const Py_ssize_t[::1] r1,
                    const double[::1] wy0, const double[::1] wy1,
                    const Py_ssize_t[::1] c0, const Py_ssize_t[::1] c1,
                    const double[::1] wx0, const double[::1] wx1):
    cdef Py_ssize_t oh = r0.shape[0]
    cdef Py_ssize_t ow = c0.shape[0]
    cdef Py_ssize_t i, j, a, b
    cdef double top, bot, v
    out = np.empty((oh, ow), dtype=np.uint8)
    cdef unsigned char[:, ::1] o = out
    with nogil:
        for i in range(oh):
            a = r0[i]
            b = r1[i]
            for j in range(ow):
                top = wx0[j] * src[a, c0[j]] + wx1[j] * src[a, c1[j]]
                bot = wx0[j] * src[b, c0[j]] + wx1[j] * src[b, c1[j]]
                v = floor(wy0[i] * top + wy1[i] * bot + 0.5)
                if v < 0.0:
                    v = 0.0
                elif v > 255.0:
                    v = 255.0
                o[i, j] = <unsigned char>v
    return out
