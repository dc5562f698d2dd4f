# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; see ``_speedups_py`` for the reference."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, pow

cnp.import_array()


def horner(coeffs, xs):
    cdef const double[::1] c = np.ascontiguousarray(coeffs, dtype=np.float64)
    cdef const double[::1] x = np.ascontiguousarray(xs, dtype=np.float64).ravel()
    out_arr = np.empty(x.shape[0], dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, j, m = c.shape[0], n = x.shape[0]
    cdef double acc, xi
    for i in range(n):
        xi = x[i]
        acc = 0.0
        for j in range(m - 1, -1, -1):
            acc = acc * xi + c[j]
        out[i] = acc
    return out_arr.reshape(np.shape(xs))


cdef inline double _horner1(const double[::1] c, double x) noexcept nogil:
    cdef Py_ssize_t j
    cdef double acc = 0.0
    for j in range(c.shape[0] - 1, -1, -1):
        acc = acc * x + c[j]
    return acc


def horner_scalar(coeffs, double x):
    cdef const double[::1] c = np.ascontiguousarray(coeffs, dtype=np.float64)
    return _horner1(c, x)


def bisect_root(coeffs, double lo, double hi, double xtol):
    cdef const double[::1] c = np.ascontiguousarray(coeffs, dtype=np.float64)
    cdef double flo, fhi, fm, mid
    cdef int it
    flo = _horner1(c, lo)
    if flo == 0.0:
        return lo
    fhi = _horner1(c, hi)
    if fhi == 0.0:
        return hi
    for it in range(200):
        if hi - lo <= xtol:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = _horner1(c, mid)
        if fm == 0.0:
            return mid
        if (fm < 0.0) == (flo < 0.0):
            lo = mid
            flo = fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def power_moments(values, nodes, weights, int basis_deg, double beta, bint signed):
    cdef const double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef const double[::1] x = np.ascontiguousarray(nodes, dtype=np.float64)
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    out_arr = np.zeros(basis_deg + 1, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, j, n = v.shape[0]
    cdef double g, xp
    for i in range(n):
        g = w[i] * pow(fabs(v[i]), beta)
        if signed:
            if v[i] < 0.0:
                g = -g
            elif v[i] == 0.0:
                g = 0.0
        xp = 1.0
        for j in range(basis_deg + 1):
            out[j] += g * xp
            xp *= x[i]
    return out_arr
