# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops.  Must agree with ``_purepy`` to rounding error."""

from libc.math cimport log2, INFINITY
import numpy as np


cdef inline double _split_gain(double g11, double g12, double g21, double g22,
                               double c1, double c2, double n0,
                               double x, double y) noexcept nogil:
    # 2**(sum-rate): sums of logs become products, min of logs the min ratio
    cdef double d1 = g11 * x + g12 * y + n0
    cdef double d2 = g21 * x + g22 * y + n0
    cdef double priv = (d1 * d2) / ((g12 * y + n0) * (g21 * x + n0))
    cdef double e1 = 1.0 / d1
    cdef double e2 = 1.0 / d2
    cdef double a1 = 1.0 + g11 * c1 * e1
    cdef double a2 = 1.0 + g12 * c2 * e1
    cdef double b1 = 1.0 + g21 * c1 * e2
    cdef double b2 = 1.0 + g22 * c2 * e2
    cdef double m = 1.0 + (g11 * c1 + g12 * c2) * e1
    cdef double t = 1.0 + (g21 * c1 + g22 * c2) * e2
    if t < m:
        m = t
    t = a1 * b2
    if t < m:
        m = t
    t = b1 * a2
    if t < m:
        m = t
    return priv * m


def grid_search(double g11, double g12, double g21, double g22,
                double p1, double p2, double n0, Py_ssize_t grid_n):
    """Exhaustive maximization over the ``grid_n x grid_n`` private-power grid.

    Returns ``(best_value, i, j)``; ties keep the smallest ``i`` then ``j``.
    """
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    cdef Py_ssize_t i, j, bi = 0, bj = 0
    cdef Py_ssize_t last = grid_n - 1
    cdef double best = -INFINITY
    cdef double v, x, y
    with nogil:
        for i in range(grid_n):
            x = p1 if i == last else i * p1 / last
            for j in range(grid_n):
                y = p2 if j == last else j * p2 / last
                v = _split_gain(g11, g12, g21, g22, p1 - x, p2 - y, n0, x, y)
                if v > best:
                    best = v
                    bi = i
                    bj = j
    return log2(best), bi, bj


cdef inline signed char _classify(double s1, double s2, double i1, double i2) noexcept nogil:
    cdef double den, gamma
    if s1 < i2 / (1.0 + s2) and s2 < i1 / (1.0 + s1):
        return 0
    if s1 < i2 and s2 < i1:
        return 1
    if s1 >= i2 and s2 < i1:
        return 2
    if s1 < i2 and s2 >= i1:
        return 3
    den = (i1 - s2) * (i2 - s1)
    if den == 0.0:
        return 4
    gamma = i1 * i2 * (s1 * s2 - i1 * i2 + s1 - i2 + s2 - i1) / den
    if gamma < 1.0:
        return 5
    return 4


def classify_many(snr1, snr2, inr1, inr2):
    """Interference-mode codes (``InterferenceMode.code``) for arrays of budgets."""
    cdef double[::1] a = np.ascontiguousarray(snr1, dtype=np.float64).ravel()
    cdef double[::1] b = np.ascontiguousarray(snr2, dtype=np.float64).ravel()
    cdef double[::1] c = np.ascontiguousarray(inr1, dtype=np.float64).ravel()
    cdef double[::1] d = np.ascontiguousarray(inr2, dtype=np.float64).ravel()
    cdef Py_ssize_t n = a.shape[0], k
    if b.shape[0] != n or c.shape[0] != n or d.shape[0] != n:
        raise ValueError("input arrays must have equal size")
    out = np.empty(n, dtype=np.int8)
    cdef signed char[::1] o = out
    with nogil:
        for k in range(n):
            o[k] = _classify(a[k], b[k], c[k], d[k])
    return out
