# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport ceil

cnp.import_array()

cdef int GLYPH = 0
cdef int SPACE = 1
cdef int NEWLINE = 2
cdef int ZERO_WIDTH = 3


def break_lines(const double[:] advances, const signed char[:] kinds, double max_width):
    cdef Py_ssize_t n = advances.shape[0]
    x0_arr = np.zeros(n, dtype=np.float64)
    x1_arr = np.zeros(n, dtype=np.float64)
    line_arr = np.zeros(n, dtype=np.int64)
    cdef double[:] x0 = x0_arr
    cdef double[:] x1 = x1_arr
    cdef long long[:] line = line_arr
    cdef long long cur = 0
    cdef double x = 0.0, a, w, pos
    cdef bint line_has = False
    cdef Py_ssize_t i = 0, j, t
    cdef int k
    while i < n:
        k = kinds[i]
        if k == NEWLINE:
            pos = x if x < max_width else max_width
            x0[i] = pos
            x1[i] = pos
            line[i] = cur
            cur += 1
            x = 0.0
            line_has = False
            i += 1
            continue
        if k == SPACE:
            a = advances[i]
            line[i] = cur
            if x + a <= max_width:
                x0[i] = x
                x1[i] = x + a
                x += a
                line_has = True
            else:
                x0[i] = x if x < max_width else max_width
                x1[i] = max_width
                cur += 1
                x = 0.0
                line_has = False
            i += 1
            continue
        j = i
        w = 0.0
        while j < n and (kinds[j] == GLYPH or kinds[j] == ZERO_WIDTH):
            w += advances[j]
            j += 1
        if x + w > max_width and line_has:
            cur += 1
            x = 0.0
            line_has = False
        for t in range(i, j):
            a = advances[t]
            if x + a > max_width and line_has:
                cur += 1
                x = 0.0
                line_has = False
            x0[t] = x
            x1[t] = x + a
            x += a
            line[t] = cur
            line_has = True
        i = j
    return x0_arr, x1_arr, line_arr


def rasterize(const double[:] x0, const double[:] x1, const double[:] y0,
              const double[:] y1, const double[:] ink, Py_ssize_t width,
              Py_ssize_t height):
    out_arr = np.zeros((height, width), dtype=np.float64)
    cdef double[:, :] out = out_arr
    cdef Py_ssize_t i, r, c, c_lo, c_hi, r_lo, r_hi
    cdef double v
    for i in range(x0.shape[0]):
        c_lo = <Py_ssize_t>ceil(x0[i] - 0.5)
        c_hi = <Py_ssize_t>ceil(x1[i] - 0.5)
        r_lo = <Py_ssize_t>ceil(y0[i] - 0.5)
        r_hi = <Py_ssize_t>ceil(y1[i] - 0.5)
        if c_lo < 0:
            c_lo = 0
        if r_lo < 0:
            r_lo = 0
        if c_hi > width:
            c_hi = width
        if r_hi > height:
            r_hi = height
        v = ink[i]
        for r in range(r_lo, r_hi):
            for c in range(c_lo, c_hi):
                out[r, c] = v
    return out_arr


def cell_stats(const double[:, :] raster, Py_ssize_t cell):
    cdef Py_ssize_t gh = raster.shape[0] // cell
    cdef Py_ssize_t gw = raster.shape[1] // cell
    mean_arr = np.zeros((gh, gw), dtype=np.float64)
    var_arr = np.zeros((gh, gw), dtype=np.float64)
    cdef double[:, :] mean = mean_arr
    cdef double[:, :] var = var_arr
    cdef Py_ssize_t gr, gc, r, c
    cdef double s, d, mu
    cdef double npx = <double>(cell * cell)
    for gr in range(gh):
        for gc in range(gw):
            s = 0.0
            for r in range(gr * cell, (gr + 1) * cell):
                for c in range(gc * cell, (gc + 1) * cell):
                    s += raster[r, c]
            mu = s / npx
            s = 0.0
            for r in range(gr * cell, (gr + 1) * cell):
                for c in range(gc * cell, (gc + 1) * cell):
                    d = raster[r, c] - mu
                    s += d * d
            mean[gr, gc] = mu
            var[gr, gc] = s / npx
    return mean_arr, var_arr


def lcs_length(const long long[:] a, const long long[:] b):
    if a.shape[0] < b.shape[0]:
        a, b = b, a
    cdef Py_ssize_t n = a.shape[0], m = b.shape[0], i, j
    if m == 0:
        return 0
    cdef long long[:] prev = np.zeros(m + 1, dtype=np.int64)
    cdef long long[:] cur = np.zeros(m + 1, dtype=np.int64)
    cdef long long[:] tmp
    for i in range(n):
        cur[0] = 0
        for j in range(1, m + 1):
            if a[i] == b[j - 1]:
                cur[j] = prev[j - 1] + 1
            elif prev[j] >= cur[j - 1]:
                cur[j] = prev[j]
            else:
                cur[j] = cur[j - 1]
        tmp = prev
        prev = cur
        cur = tmp
    return int(prev[m])
