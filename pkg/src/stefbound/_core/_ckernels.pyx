# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled grid kernels; sums use Neumaier compensation."""

import numpy as np

from libc.math cimport fabs


cdef inline void _acc(double v, double* s, double* c) noexcept nogil:
    cdef double t = s[0] + v
    if fabs(s[0]) >= fabs(v):
        c[0] += (s[0] - t) + v
    else:
        c[0] += (v - t) + s[0]
    s[0] = t


def simpson(y, double h):
    cdef const double[::1] v = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t n = v.shape[0] - 1, i
    cdef double s = 0.0, c = 0.0
    with nogil:
        _acc(v[0], &s, &c)
        _acc(v[n], &s, &c)
        for i in range(1, n, 2):
            _acc(4.0 * v[i], &s, &c)
        for i in range(2, n, 2):
            _acc(2.0 * v[i], &s, &c)
    return h / 3.0 * (s + c)


def trapezoid(x, y):
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t i
    cdef double s = 0.0, c = 0.0
    with nogil:
        for i in range(xv.shape[0] - 1):
            _acc((xv[i + 1] - xv[i]) * (yv[i] + yv[i + 1]), &s, &c)
    return (s + c) / 2.0


def cellwise_simpson(x, y, ym):
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef const double[::1] mv = np.ascontiguousarray(ym, dtype=np.float64)
    cdef Py_ssize_t i
    cdef double s = 0.0, c = 0.0
    with nogil:
        for i in range(xv.shape[0] - 1):
            _acc((xv[i + 1] - xv[i]) / 6.0 * (yv[i] + 4.0 * mv[i] + yv[i + 1]), &s, &c)
    return s + c


def cumulative_simpson(x, y, ym):
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef const double[::1] mv = np.ascontiguousarray(ym, dtype=np.float64)
    out = np.empty(xv.shape[0])
    cdef double[::1] o = out
    cdef Py_ssize_t i
    cdef double s = 0.0, c = 0.0
    with nogil:
        o[0] = 0.0
        for i in range(xv.shape[0] - 1):
            _acc((xv[i + 1] - xv[i]) / 6.0 * (yv[i] + 4.0 * mv[i] + yv[i + 1]), &s, &c)
            o[i + 1] = s + c
    return out


def rs_sum(p, f):
    cdef const double[::1] pv = np.ascontiguousarray(p, dtype=np.float64)
    cdef const double[::1] fv = np.ascontiguousarray(f, dtype=np.float64)
    cdef Py_ssize_t i
    cdef double s = 0.0, c = 0.0
    with nogil:
        for i in range(pv.shape[0]):
            _acc(pv[i] * (fv[i + 1] - fv[i]), &s, &c)
    return s + c


def variation(y):
    cdef const double[::1] v = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t i
    cdef double s = 0.0, c = 0.0
    with nogil:
        for i in range(v.shape[0] - 1):
            _acc(fabs(v[i + 1] - v[i]), &s, &c)
    return s + c


def max_slope(x, y):
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t i
    cdef double m = 0.0, r
    with nogil:
        for i in range(xv.shape[0] - 1):
            r = fabs(yv[i + 1] - yv[i]) / (xv[i + 1] - xv[i])
            if r > m:
                m = r
    return m
