# cython: language_level=3
"""Compiled kernels: ordered-pair minimum, grid-pruned minimum, strip scan.

Same contracts and floating point operation order as ``_fallback``.
"""
import math

import numpy as np

cimport cython
from cython.parallel cimport prange
from libc.math cimport fabs, floor, INFINITY

from pointline._fallback import BAND_MARGIN, grid_cell


def min_pair_brute(double[::1] x, double[::1] y, double[::1] t, int num_threads=1):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t a, b
    cdef double d, m
    cdef double[::1] row_min = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t[::1] row_arg = np.empty(n, dtype=np.intp)
    if num_threads < 1:
        num_threads = 1
    # per-row minima in parallel, then a serial argmin: result is thread-count independent
    for a in prange(n, nogil=True, num_threads=num_threads, schedule="static"):
        m = INFINITY
        row_arg[a] = -1
        for b in range(n):
            if b == a:
                continue
            d = fabs(y[a] - y[b] - t[b] * (x[a] - x[b]))
            if d < m:
                m = d
                row_arg[a] = b
        row_min[a] = m
    cdef double best = INFINITY
    cdef Py_ssize_t wa = -1, wb = -1
    for a in range(n):
        if row_min[a] < best:
            best = row_min[a]
            wa = a
            wb = row_arg[a]
    return best, wa, wb


@cython.cdivision(True)
def min_pair_grid(x_in, y_in, t_in, cell=None):
    cdef double[::1] x = x_in
    cdef double[::1] y = y_in
    cdef double[::1] t = t_in
    cdef Py_ssize_t n = x.shape[0]
    if n < 64:
        return min_pair_brute(x, y, t)
    cdef double xmin = np.min(x_in), ymin = np.min(y_in)
    cdef double sx = np.max(x_in) - xmin, sy = np.max(y_in) - ymin
    cdef double c = grid_cell(n, sx, sy, cell)
    cdef Py_ssize_t ncols = max(1, <Py_ssize_t>floor(sx / c) + 1)
    cdef Py_ssize_t nrows = max(1, <Py_ssize_t>floor(sy / c) + 1)

    cdef Py_ssize_t i, k, col, row, cid
    cdef Py_ssize_t[::1] cell_of = np.empty(n, dtype=np.intp)
    cdef Py_ssize_t[::1] start = np.zeros(ncols * nrows + 1, dtype=np.intp)
    cdef Py_ssize_t[::1] order = np.empty(n, dtype=np.intp)
    cdef Py_ssize_t[::1] fill
    for i in range(n):
        col = <Py_ssize_t>((x[i] - xmin) / c)
        row = <Py_ssize_t>((y[i] - ymin) / c)
        if col > ncols - 1:
            col = ncols - 1
        if row > nrows - 1:
            row = nrows - 1
        cid = col * nrows + row
        cell_of[i] = cid
        start[cid + 1] += 1
    for k in range(ncols * nrows):
        start[k + 1] += start[k]
    fill = np.array(start[:ncols * nrows], dtype=np.intp)
    for i in range(n):
        order[fill[cell_of[i]]] = i
        fill[cell_of[i]] += 1

    cdef double best = INFINITY, d
    cdef Py_ssize_t wa = -1, wb = -1, a, b, p, q
    # finite starting bound from neighbours in bucket order (both directions)
    for k in range(n - 1):
        p = order[k]
        q = order[k + 1]
        for i in range(2):
            if i == 1:
                p, q = q, p
            d = fabs(y[p] - y[q] - t[q] * (x[p] - x[q]))
            if d < best or (d == best and (p < wa or (p == wa and q < wb))):
                best = d
                wa = p
                wb = q

    cdef double xb, yb, tb, xl, xr, yl, yr, lo, hi
    cdef Py_ssize_t r0, r1, s, e
    for b in range(n):
        xb = x[b]
        yb = y[b]
        tb = t[b]
        for col in range(ncols):
            xl = xmin + col * c
            xr = xl + c
            yl = yb + tb * (xl - xb)
            yr = yb + tb * (xr - xb)
            if yl <= yr:
                lo = yl - best - BAND_MARGIN
                hi = yr + best + BAND_MARGIN
            else:
                lo = yr - best - BAND_MARGIN
                hi = yl + best + BAND_MARGIN
            lo = floor((lo - ymin) / c)
            hi = floor((hi - ymin) / c)
            if hi < 0 or lo > nrows - 1:
                continue
            r0 = 0 if lo < 0 else <Py_ssize_t>lo
            r1 = nrows - 1 if hi > nrows - 1 else <Py_ssize_t>hi
            s = start[col * nrows + r0]
            e = start[col * nrows + r1 + 1]
            for k in range(s, e):
                a = order[k]
                if a == b:
                    continue
                d = fabs(y[a] - yb - tb * (x[a] - xb))
                if d < best or (d == best and (a < wa or (a == wa and b < wb))):
                    best = d
                    wa = a
                    wb = b
    return best, wa, wb


def strip_scan(double[::1] x, double[::1] y, slopes_in, double half_width):
    cdef double[::1] slopes = np.ascontiguousarray(slopes_in, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0], ns = slopes.shape[0]
    cdef Py_ssize_t i, j, q
    cdef double s
    cdef bint free
    out = np.full(n, -1, dtype=np.int64)
    cdef long long[::1] res = out
    for i in range(n):
        for j in range(ns):
            s = slopes[j]
            free = True
            for q in range(n):
                if q == i:
                    continue
                if fabs(y[q] - y[i] - s * (x[q] - x[i])) <= half_width:
                    free = False
                    break
            if free:
                res[i] = j
                break
    return out
