"""Numpy implementations of the compiled kernels.

Used when the extension is not built or ``AMPSHARE_PURE_PYTHON`` is set.
"""

import numpy as np

_ROW_BLOCK = 64


def _split_gain(g11, g12, g21, g22, p1, p2, n0, x, y):
    """``2**sum_rate`` of the split; the log is taken once at the optimum."""
    c1 = p1 - x
    c2 = p2 - y
    d1 = g11 * x + g12 * y + n0
    d2 = g21 * x + g22 * y + n0
    priv = (d1 / (g12 * y + n0)) * (d2 / (g21 * x + n0))
    a1 = 1.0 + g11 * c1 / d1
    a2 = 1.0 + g12 * c2 / d1
    b1 = 1.0 + g21 * c1 / d2
    b2 = 1.0 + g22 * c2 / d2
    s1 = 1.0 + (g11 * c1 + g12 * c2) / d1
    s2 = 1.0 + (g21 * c1 + g22 * c2) / d2
    return priv * np.minimum(np.minimum(s1, s2), np.minimum(a1 * b2, b1 * a2))


def _axis(p, n):
    pts = np.arange(n, dtype=np.float64) * p / (n - 1)
    pts[-1] = p
    return pts


def grid_search(g11, g12, g21, g22, p1, p2, n0, grid_n):
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    xs = _axis(p1, grid_n)
    ys = _axis(p2, grid_n)[np.newaxis, :]
    best, bi, bj = -np.inf, 0, 0
    for start in range(0, grid_n, _ROW_BLOCK):
        block = xs[start:start + _ROW_BLOCK, np.newaxis]
        vals = _split_gain(g11, g12, g21, g22, p1, p2, n0, block, ys)
        k = int(np.argmax(vals))
        v = float(vals.flat[k])
        # strict '>' keeps the earliest block on ties
        if v > best:
            best = v
            bi, bj = divmod(k, grid_n)
            bi += start
    return float(np.log2(best)), bi, bj


def classify_many(snr1, snr2, inr1, inr2):
    s1 = np.asarray(snr1, dtype=np.float64).ravel()
    s2 = np.asarray(snr2, dtype=np.float64).ravel()
    i1 = np.asarray(inr1, dtype=np.float64).ravel()
    i2 = np.asarray(inr2, dtype=np.float64).ravel()
    if not (s1.size == s2.size == i1.size == i2.size):
        raise ValueError("input arrays must have equal size")
    out = np.full(s1.size, 4, dtype=np.int8)
    with np.errstate(divide="ignore", invalid="ignore"):
        den = (i1 - s2) * (i2 - s1)
        gamma = i1 * i2 * (s1 * s2 - i1 * i2 + s1 - i2 + s2 - i1) / den
    out[(den != 0.0) & (gamma < 1.0)] = 5
    # assign in reverse table order so earlier rows win
    out[(s1 < i2) & (s2 >= i1)] = 3
    out[(s1 >= i2) & (s2 < i1)] = 2
    out[(s1 < i2) & (s2 < i1)] = 1
    out[(s1 < i2 / (1.0 + s2)) & (s2 < i1 / (1.0 + s1))] = 0
    return out
