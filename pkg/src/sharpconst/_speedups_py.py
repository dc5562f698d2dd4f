"""Pure-Python/numpy versions of the hot kernels.

These mirror ``_speedups.pyx`` one to one and are used whenever the compiled
extension is unavailable or ``SHARPCONST_PURE_PYTHON`` is set.
"""

from __future__ import annotations

import numpy as np


def horner(coeffs, xs):
    """Evaluate an ascending-order float polynomial at every point of ``xs``."""
    c = np.asarray(coeffs, dtype=float)
    x = np.asarray(xs, dtype=float)
    out = np.zeros_like(x)
    for ci in c[::-1]:
        out *= x
        out += ci
    return out


def horner_scalar(coeffs, x):
    acc = 0.0
    for ci in reversed(coeffs):
        acc = acc * x + ci
    return acc


def bisect_root(coeffs, lo, hi, xtol):
    """Bisection on [lo, hi] for a polynomial with a sign change there.

    Returns the midpoint of the final bracket (width <= xtol).
    """
    c = [float(v) for v in coeffs]
    flo = horner_scalar(c, lo)
    if flo == 0.0:
        return lo
    fhi = horner_scalar(c, hi)
    if fhi == 0.0:
        return hi
    for _ in range(200):
        if hi - lo <= xtol:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = horner_scalar(c, mid)
        if fm == 0.0:
            return mid
        if (fm < 0.0) == (flo < 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def power_moments(values, nodes, weights, basis_deg, beta, signed):
    """Sums ``sum_i w_i |v_i|^beta sgn(v_i)^signed x_i^j`` for j = 0..basis_deg.

    ``values`` are residual values already divided by any endpoint root
    factors; the caller folds those factors into ``weights``.
    """
    v = np.asarray(values, dtype=float)
    x = np.asarray(nodes, dtype=float)
    g = np.asarray(weights, dtype=float) * np.abs(v) ** beta
    if signed:
        g = g * np.sign(v)
    out = np.empty(basis_deg + 1)
    acc = g
    for j in range(basis_deg + 1):
        out[j] = acc.sum()
        acc = acc * x
    return out
