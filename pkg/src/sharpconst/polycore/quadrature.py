"""Integration of powers ``|f|^beta`` of piecewise polynomials.

[0, 1] is cut at knots and real roots, so f has constant sign on each
segment.  On a segment that ends at a root of multiplicity m, ``|f|^beta``
behaves like ``|x - z|^(m beta)``.  The endpoint factor is absorbed into a
Gauss-Jacobi weight and the rest is analytic, so a 32-point rule usually
converges in one pass.  Recursive halving (cap ``MAX_SEGMENTS``) covers
the cases where that fails.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import List

import numpy as np
from scipy.special import roots_jacobi

from .. import _accel
from ..errors import DomainError
from .piecewise import PiecewisePolynomial
from .polynomial import Polynomial
from .roots import real_roots_exact, real_roots_float

GAUSS_POINTS = 32
QUAD_RTOL = 1e-12
MAX_SEGMENTS = 2 ** 14
_MIN_EXPONENT = -0.999


@dataclass(frozen=True)
class Segment:
    """Sign-constant stretch ``[x0, x1]`` of one polynomial piece.

    ``m0``/``m1`` are root multiplicities at the ends (0 when the end is
    not a root).  ``sign`` is 0 for an identically vanishing piece.
    """

    x0: float
    x1: float
    coeffs: np.ndarray
    m0: int
    m1: int
    sign: int


def _as_piecewise(f) -> PiecewisePolynomial:
    if isinstance(f, Polynomial):
        return PiecewisePolynomial.from_polynomial(f)
    return f


def sign_segments(f) -> List[Segment]:
    """Split [0, 1] into sign-constant segments of f (float arithmetic)."""
    f = _as_piecewise(f)
    segs: List[Segment] = []
    for (a, b), p in zip(f.intervals(), f.pieces):
        a, b = float(a), float(b)
        c = p.array
        if not np.any(c):
            segs.append(Segment(a, b, c, 0, 0, 0))
            continue
        roots = real_roots_float(c, a, b)
        tol = 4 * np.finfo(float).eps * max(1.0, abs(b))
        m_at = {}
        inner = []
        for x, m in roots:
            if abs(x - a) <= tol:
                m_at[a] = m
            elif abs(x - b) <= tol:
                m_at[b] = m
            else:
                inner.append((x, m))
        pts = [(a, m_at.get(a, 0))] + inner + [(b, m_at.get(b, 0))]
        for (x0, mm0), (x1, mm1) in zip(pts[:-1], pts[1:]):
            if x1 <= x0:
                continue
            mid = _accel.horner_scalar(c, 0.5 * (x0 + x1))
            s = 1 if mid > 0 else (-1 if mid < 0 else 0)
            segs.append(Segment(x0, x1, c, mm0, mm1, s))
    return segs


@lru_cache(maxsize=256)
def _jacobi_rule(npts: int, alpha: float, beta: float):
    if alpha == 0.0 and beta == 0.0:
        t, w = np.polynomial.legendre.leggauss(npts)
    else:
        t, w = roots_jacobi(npts, alpha, beta)
    t.setflags(write=False)
    w.setflags(write=False)
    return t, w


def _taylor_shift(c, x0: float) -> np.ndarray:
    """Coefficients of the same polynomial in powers of ``(x - x0)``."""
    t = np.array(c, dtype=float)
    n = len(t)
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            t[j] += x0 * t[j + 1]
    return t


def _deflate(seg: Segment) -> np.ndarray:
    """Quotient of the segment polynomial by its end roots, in powers of ``x - x0``.

    The end factors ``(x-x0)^m0 (x-x1)^m1`` are removed by dropping the
    leading Taylor terms at x0 and then by synthetic division by ``s - L``
    with ``L = x1 - x0``.  Remainders are discarded: they are rounding-level
    residue of a root that is treated as exact.
    """
    t = _taylor_shift(seg.coeffs, seg.x0)[seg.m0:]
    L = seg.x1 - seg.x0
    for _ in range(seg.m1):
        if len(t) <= 1:
            break
        b = np.zeros(len(t) - 1)
        b[-1] = t[-1]
        for i in range(len(t) - 2, 0, -1):
            b[i - 1] = t[i] + L * b[i]
        t = b
    return t if len(t) else np.zeros(1)


def _segment_rule(seg: Segment, qc, a, b, beta, npts):
    """Rule on ``[a, b]`` inside ``seg`` for ``|f|^beta``.

    End roots of the segment that coincide with a or b go into the Jacobi
    weight; otherwise their factors are multiplied in as smooth functions.
    """
    if b - a <= 64 * np.finfo(float).eps * max(1.0, abs(b)):
        # a sliver between nearly coincident roots; its mass is negligible
        empty = np.zeros(0)
        return empty, empty, empty
    at0 = seg.m0 and a == seg.x0
    at1 = seg.m1 and b == seg.x1
    e0 = max(beta * seg.m0, _MIN_EXPONENT) if at0 else 0.0
    e1 = max(beta * seg.m1, _MIN_EXPONENT) if at1 else 0.0
    t, om = _jacobi_rule(npts, e1, e0)
    half = 0.5 * (b - a)
    x = a + (t + 1.0) * half
    w = om * half ** (1.0 + e0 + e1)
    if beta != 0.0:
        w = w * np.abs(_accel.horner(qc, x - seg.x0)) ** beta
        if seg.m0 and not at0:
            w = w * np.abs(x - seg.x0) ** (beta * seg.m0)
        if seg.m1 and not at1:
            w = w * np.abs(seg.x1 - x) ** (beta * seg.m1)
    return x, w, np.full(len(x), float(seg.sign))


def power_rule(f, beta: float, npts: int = GAUSS_POINTS, rtol: float = QUAD_RTOL,
               max_segments: int = MAX_SEGMENTS, segments=None):
    """Nodes and weights for integrals against ``|f|^beta``.

    Returns ``(x, w, s)`` such that ``sum(w * g(x))`` approximates
    ``int_0^1 |f(x)|^beta g(x) dx`` for smooth g, and ``s = sign f(x)``.
    """
    segs = sign_segments(f) if segments is None else segments
    xs, ws, ss = [], [], []
    budget = max_segments
    for seg in segs:
        if seg.sign == 0:
            continue
        qc = _deflate(seg)
        stack = [(seg.x0, seg.x1, None)]
        while stack:
            x0, x1, whole = stack.pop()
            if whole is None:
                whole = _segment_rule(seg, qc, x0, x1, beta, npts)
            xm = 0.5 * (x0 + x1)
            left = _segment_rule(seg, qc, x0, xm, beta, npts)
            right = _segment_rule(seg, qc, xm, x1, beta, npts)
            i1 = whole[1].sum()
            i2 = left[1].sum() + right[1].sum()
            budget -= 1
            done = (
                abs(i1 - i2) <= rtol * abs(i2)
                or budget <= 0
                or xm <= x0
                or xm >= x1
                or not np.isfinite(i2)
            )
            if done:
                for part in (left, right):
                    xs.append(part[0])
                    ws.append(part[1])
                    ss.append(part[2])
            else:
                stack.append((xm, x1, right))
                stack.append((x0, xm, left))
    if not xs:
        return np.zeros(0), np.zeros(0), np.zeros(0)
    return np.concatenate(xs), np.concatenate(ws), np.concatenate(ss)


def power_moments(f, beta: float, degree: int, signed: bool = True, segments=None) -> np.ndarray:
    """``int_0^1 x^j |f|^beta sgn(f) dx`` (``sgn`` omitted if not signed), j <= degree."""
    x, w, s = power_rule(f, beta, segments=segments)
    if len(x) == 0:
        return np.zeros(degree + 1)
    # the kernel takes |v|^beta itself; feed unit-magnitude values carrying sign
    return _accel.power_moments(s, x, w, degree, 0.0, signed)


# -- exact power integrals --------------------------------------------------

def _exact_sign_breaks(p: Polynomial, a, b):
    """Rational sign-change points of p in (a, b), or None if any is irrational."""
    pts = []
    for r0, r1, m in real_roots_exact(p, a, b):
        if m % 2 == 0:
            continue
        if r0 != r1:
            return None
        if a < r0 < b:
            pts.append(r0)
    return pts


def lq_integral(f, q):
    """``int_0^1 |f|^q dx``.

    On the exact backend with integer q the result is an exact rational
    when q is even or every sign change is rational.  Everything else goes
    through :func:`power_rule`.  On a sign segment ``|f|^q`` is then a
    polynomial for integer q, so the Gauss rule is exact up to rounding,
    and it avoids the cancellation of expanding ``f**q``.
    """
    f = _as_piecewise(f)
    if q < 1:
        raise DomainError(f"q = {q} < 1")
    qi = int(q) if float(q).is_integer() else None
    if qi is not None and f.degree * qi <= 64:
        if f.exact:
            total = Fraction(0)
            ok = True
            for (a, b), p in zip(f.intervals(), f.pieces):
                pq = p ** qi
                if qi % 2 == 0:
                    total += pq.integral(a, b)
                    continue
                br = _exact_sign_breaks(p, a, b)
                if br is None:
                    ok = False
                    break
                pts = [a] + br + [b]
                F = pq.antiderivative()
                for s, e in zip(pts[:-1], pts[1:]):
                    total += abs(F(e) - F(s))
            if ok:
                return total
            f = f.to_float()
    x, w, _ = power_rule(f, float(q))
    return float(w.sum())


def sup_norm(f):
    """Max of |f| over [0, 1], counting one-sided limits at the knots."""
    f = _as_piecewise(f)
    best = 0
    for (a, b), p in zip(f.intervals(), f.pieces):
        cands = [p(a), p(b)]
        c = p.array
        if len(c) > 2:
            dc = np.arange(1, len(c)) * c[1:]
            for x, _ in real_roots_float(dc, float(a), float(b)):
                cands.append(_accel.horner_scalar(c, x))
        for v in cands:
            if abs(v) > best:
                best = abs(v)
    return best


def local_extrema(f):
    """``[(x, value)]`` at every piece endpoint (one-sided) and interior critical point."""
    f = _as_piecewise(f)
    out = []
    for (a, b), p in zip(f.intervals(), f.pieces):
        c = p.array
        a, b = float(a), float(b)
        out.append((a, _accel.horner_scalar(c, a)))
        if len(c) > 2:
            dc = np.arange(1, len(c)) * c[1:]
            for x, _ in real_roots_float(dc, a, b):
                if a < x < b:
                    out.append((x, _accel.horner_scalar(c, x)))
        out.append((b, _accel.horner_scalar(c, b)))
    return out


def lq_norm(f, q):
    """``||f||_{L_q[0,1]}`` for q in [1, inf].

    Returns a ``Fraction`` for q = 1 on the exact backend when the sign
    changes are rational, a float otherwise.
    """
    if q == float("inf"):
        return sup_norm(f)
    if q < 1:
        raise DomainError(f"q = {q} < 1")
    val = lq_integral(f, q)
    if q == 1:
        return val
    return float(val) ** (1.0 / float(q))
