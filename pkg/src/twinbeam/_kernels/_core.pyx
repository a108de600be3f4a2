# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: superpixel block sums, photon deposits and
shifted-Pearson correlation maps.

API mirrors ``_numpy``; see that module for the contracts.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

from libc.math cimport sqrt


def block_sum(image, Py_ssize_t n):
    image = np.ascontiguousarray(image, dtype=np.float64)
    cdef const double[:, ::1] img = image
    cdef Py_ssize_t h = img.shape[0], w = img.shape[1]
    cdef Py_ssize_t hb = h // n, wb = w // n
    out_arr = np.zeros((hb, wb), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t bi, bj, i, j
    cdef double acc
    for bi in range(hb):
        for bj in range(wb):
            acc = 0.0
            for i in range(bi * n, bi * n + n):
                for j in range(bj * n, bj * n + n):
                    acc += img[i, j]
            out[bi, bj] = acc
    return out_arr


def deposit(out, rows, cols):
    cdef double[:, ::1] o = out
    cdef const cnp.int64_t[::1] r = np.ascontiguousarray(rows, dtype=np.int64)
    cdef const cnp.int64_t[::1] c = np.ascontiguousarray(cols, dtype=np.int64)
    cdef Py_ssize_t k, m = r.shape[0]
    for k in range(m):
        o[r[k], c[k]] += 1.0
    return out


def deposit_weighted(out, rows, cols, weights):
    cdef double[:, ::1] o = out
    cdef const cnp.int64_t[::1] r = np.ascontiguousarray(rows, dtype=np.int64)
    cdef const cnp.int64_t[::1] c = np.ascontiguousarray(cols, dtype=np.int64)
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t k, m = r.shape[0]
    for k in range(m):
        o[r[k], c[k]] += w[k]
    return out


def pearson_shift_map(a, b, Py_ssize_t radius_r, Py_ssize_t radius_c):
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    cdef const double[:, ::1] av = a
    cdef const double[:, ::1] bv = b
    cdef Py_ssize_t h = av.shape[0], w = av.shape[1]
    out_arr = np.zeros((2 * radius_r + 1, 2 * radius_c + 1), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t dr, dc, r0, r1, c0, c1, i, j
    cdef double sa, sb, saa, sbb, sab, npx, da, db, va, vb, cov, am, bm
    for dr in range(-radius_r, radius_r + 1):
        for dc in range(-radius_c, radius_c + 1):
            r0 = dr if dr > 0 else 0
            r1 = h + (dr if dr < 0 else 0)
            c0 = dc if dc > 0 else 0
            c1 = w + (dc if dc < 0 else 0)
            if r1 - r0 < 2 or c1 - c0 < 2:
                continue
            sa = 0.0
            sb = 0.0
            for i in range(r0, r1):
                for j in range(c0, c1):
                    sa += av[i - dr, j - dc]
                    sb += bv[i, j]
            npx = <double> ((r1 - r0) * (c1 - c0))
            am = sa / npx
            bm = sb / npx
            saa = 0.0
            sbb = 0.0
            sab = 0.0
            for i in range(r0, r1):
                for j in range(c0, c1):
                    da = av[i - dr, j - dc] - am
                    db = bv[i, j] - bm
                    saa += da * da
                    sbb += db * db
                    sab += da * db
            va = saa
            vb = sbb
            cov = sab
            if va <= 0.0 or vb <= 0.0:
                continue
            out[dr + radius_r, dc + radius_c] = cov / sqrt(va * vb)
    return out_arr
