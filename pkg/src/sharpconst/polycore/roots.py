"""Real-root isolation for polynomials and piecewise polynomials.

Float pieces are handled by recursive bracketing: the real roots of p' split
the interval into monotone runs, and every run with a sign change holds exactly
one simple root, located by bisection.  Values below a coefficient-scaled
threshold count as zero, so a touching (even) root shows up as a
critical point where p vanishes.

Exact pieces go through Yun's square-free decomposition and Sturm sequences.
Multiplicities are then exact, and the isolating intervals are rational.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List

import numpy as np

from .. import _accel
from ..errors import DomainError
from .piecewise import PiecewisePolynomial
from .polynomial import Polynomial

DEFAULT_XTOL = 1e-14


@dataclass(frozen=True)
class Root:
    """An isolated root: the interval [lo, hi] holds exactly one root.

    kind is ``"root"`` for a zero of a piece, ``"jump"`` for an interior knot
    where the one-sided limits have strictly opposite signs, and
    ``"degenerate"`` for a piece that vanishes identically on [lo, hi].
    """

    lo: object
    hi: object
    multiplicity: int = 1
    kind: str = "root"

    @property
    def point(self):
        return self.lo if self.lo == self.hi else (self.lo + self.hi) / 2

    @property
    def even(self) -> bool:
        return self.kind == "root" and self.multiplicity % 2 == 0

    @property
    def sign_change(self) -> bool:
        return self.kind == "jump" or (self.kind == "root" and self.multiplicity % 2 == 1)


# -- float backend ----------------------------------------------------------

def _zero_tol(c: np.ndarray, x: float) -> float:
    ax = max(1.0, abs(x))
    scale = float(np.sum(np.abs(c) * ax ** np.arange(len(c))))
    return 64 * np.finfo(float).eps * scale


def _trim(c: np.ndarray) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    nz = np.nonzero(c)[0]
    if len(nz) == 0:
        return c[:1] * 0.0
    return c[: nz[-1] + 1]


def real_roots_float(coeffs, lo: float, hi: float, xtol: float = DEFAULT_XTOL):
    """Roots of a float polynomial in the closed interval [lo, hi].

    Returns a sorted list of ``(x, multiplicity)`` where multiplicity is 1
    for a simple crossing, 2 for a touching root and 3 for an odd root of
    higher order (flat crossing).
    """
    c = _trim(coeffs)
    deg = len(c) - 1
    if deg <= 0:
        return []
    if deg == 1:
        x = -c[0] / c[1]
        return [(x, 1)] if lo <= x <= hi else []
    crit = [x for x, _ in real_roots_float(np.arange(1, deg + 1) * c[1:], lo, hi, xtol)]
    pts = sorted(set([lo, hi] + [x for x in crit if lo < x < hi]))
    vals = [_accel.horner_scalar(c, x) for x in pts]
    signs = [0 if abs(v) <= _zero_tol(c, x) else (1 if v > 0 else -1) for x, v in zip(pts, vals)]

    out = []
    for i, (x, s) in enumerate(zip(pts, signs)):
        if s != 0:
            continue
        if 0 < i < len(pts) - 1:
            # interior critical point with vanishing value
            sl = _side_sign(c, pts[i - 1], x)
            sr = _side_sign(c, x, pts[i + 1])
            out.append((x, 3 if sl * sr < 0 else 2))
        else:
            out.append((x, 1))
    for i in range(len(pts) - 1):
        if signs[i] * signs[i + 1] < 0:
            out.append((_accel.bisect_root(c, pts[i], pts[i + 1], xtol), 1))
    out.sort()
    return out


def _side_sign(c, a, b) -> int:
    v = _accel.horner_scalar(c, 0.5 * (a + b))
    return 1 if v > 0 else (-1 if v < 0 else 0)


# -- exact backend ----------------------------------------------------------

def _monic(p: Polynomial) -> Polynomial:
    return p / p.leading()


def poly_divmod(a: Polynomial, b: Polynomial):
    """Exact polynomial long division ``a = q b + r``."""
    if b.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a.coeffs)
    q = [Fraction(0)] * max(1, len(r) - b.degree)
    lb = b.leading()
    db = b.degree
    while len(r) - 1 >= db and any(v != 0 for v in r):
        shift = len(r) - 1 - db
        coef = r[-1] / lb
        q[shift] = coef
        for i, bc in enumerate(b.coeffs):
            r[shift + i] -= coef * bc
        r.pop()
        while len(r) > 1 and r[-1] == 0:
            r.pop()
    return Polynomial(q, "exact"), Polynomial(r or [0], "exact")


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    while not b.is_zero():
        _, r = poly_divmod(a, b)
        a, b = b, r
    return _monic(a) if not a.is_zero() else a


def squarefree_decomposition(p: Polynomial):
    """Yun's algorithm: ``[(f_i, i)]`` with p = c * prod f_i**i, f_i square-free."""
    p = p.to_exact()
    if p.degree <= 0:
        return []
    out = []
    dp = p.derivative()
    a = poly_gcd(p, dp)
    b, _ = poly_divmod(p, a)
    c, _ = poly_divmod(dp, a)
    d = c - b.derivative()
    i = 1
    while b.degree > 0:
        a = poly_gcd(b, d)
        if a.degree > 0:
            out.append((a, i))
        b, _ = poly_divmod(b, a)
        c, _ = poly_divmod(d, a)
        d = c - b.derivative()
        i += 1
    return out


def sturm_sequence(p: Polynomial):
    seq = [p, p.derivative()]
    while not seq[-1].is_zero() and seq[-1].degree > 0:
        _, r = poly_divmod(seq[-2], seq[-1])
        if r.is_zero():
            break
        seq.append(-r)
    return seq


def _variations(seq, x) -> int:
    signs = [s(x) for s in seq]
    signs = [v for v in signs if v != 0]
    return sum(1 for u, v in zip(signs, signs[1:]) if (u < 0) != (v < 0))


def _isolate_squarefree(f: Polynomial, lo: Fraction, hi: Fraction, eps: Fraction):
    """Intervals (half-open (lo, hi]) isolating each root of square-free f."""
    seq = sturm_sequence(f)
    out = []
    stack = [(lo, hi)]
    while stack:
        a, b = stack.pop()
        count = _variations(seq, a) - _variations(seq, b)
        if count == 0:
            continue
        if count == 1:
            out.append(_refine_simple(f, a, b, eps))
            continue
        m = (a + b) / 2
        stack.append((m, b))
        stack.append((a, m))
    out.sort(key=lambda iv: iv[0])
    return out


def _refine_simple(f: Polynomial, a: Fraction, b: Fraction, eps: Fraction):
    fb = f(b)
    if fb == 0:
        return b, b
    # a itself may be a root of f, so bracket against the sign at b
    while b - a > eps:
        m = (a + b) / 2
        fm = f(m)
        if fm == 0:
            return m, m
        if (fm < 0) == (fb < 0):
            b = m
        else:
            a = m
    # snap to a nearby small-denominator rational if it is an exact root
    cand = ((a + b) / 2).limit_denominator(10 ** 6)
    if a <= cand <= b and f(cand) == 0:
        return cand, cand
    return a, b


def real_roots_exact(p: Polynomial, lo, hi, eps: Fraction = Fraction(1, 2 ** 47)):
    """Exact isolation on the closed interval [lo, hi]: ``[(lo_i, hi_i, mult)]``."""
    lo, hi = Fraction(lo), Fraction(hi)
    out = []
    for f, mult in squarefree_decomposition(p):
        if f(lo) == 0:
            out.append((lo, lo, mult))
        for a, b in _isolate_squarefree(f, lo, hi, eps):
            out.append((a, b, mult))
    out.sort(key=lambda r: r[0])
    return out


# -- piecewise --------------------------------------------------------------

def isolate_roots(f, lo=0, hi=1, eps: float = DEFAULT_XTOL) -> List[Root]:
    """Isolate every real root and sign-changing jump of f in (lo, hi).

    Parameters
    ----------
    f : PiecewisePolynomial or Polynomial
    lo, hi : scalars with 0 <= lo < hi <= 1
    eps : float
        Isolation width for float pieces; exact pieces use 2**-47.

    Returns
    -------
    list of Root
        Ordered left to right.  Identically zero pieces appear once as a
        ``"degenerate"`` entry spanning their overlap with (lo, hi).
    """
    if isinstance(f, Polynomial):
        f = PiecewisePolynomial.from_polynomial(f)
    if not (0 <= lo < hi <= 1):
        raise DomainError(f"need 0 <= lo < hi <= 1, got [{lo}, {hi}]")
    exact = f.exact
    found: List[Root] = []
    for (a, b), p in zip(f.intervals(), f.pieces):
        s, e = max(a, lo), min(b, hi)
        if s >= e:
            continue
        if p.is_zero() or (not exact and _is_float_zero(p)):
            found.append(Root(s, e, 0, "degenerate"))
            continue
        if exact:
            for r0, r1, m in real_roots_exact(p, s, e):
                found.append(Root(r0, r1, m, "root"))
        else:
            for x, m in real_roots_float(p.array, float(s), float(e), eps):
                found.append(Root(float(x), float(x), m, "root"))
    for t in f.knots[1:-1]:
        if not lo < t < hi:
            continue
        left, right, _ = f.limits(t)
        if (left > 0 and right < 0) or (left < 0 and right > 0):
            found.append(Root(t, t, 1, "jump"))

    found.sort(key=lambda r: (r.lo, r.kind != "degenerate"))
    out: List[Root] = []
    for r in found:
        if r.kind != "degenerate" and not (lo < r.hi and r.lo < hi):
            continue
        if r.kind == "root" and out and out[-1].kind == "root" and _same_point(out[-1], r):
            continue
        if r.kind == "root" and out and out[-1].kind == "degenerate" and out[-1].lo <= r.lo <= out[-1].hi:
            continue
        out.append(r)
    return out


def _same_point(r1: Root, r2: Root) -> bool:
    return r1.lo <= r2.hi and r2.lo <= r1.hi


def _is_float_zero(p: Polynomial) -> bool:
    return not np.any(p.array)
