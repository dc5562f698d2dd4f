"""Piecewise polynomials on [0, 1] with explicit knots and jump data."""

from __future__ import annotations

from bisect import bisect_right
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..errors import DomainError
from .polynomial import EXACT, FLOAT, Polynomial, Scalar, as_polynomial


class PiecewisePolynomial:
    """One polynomial per subinterval ``[t_i, t_{i+1}]`` of a knot vector.

    Knots are strictly increasing, start at 0 and end at 1.  Pieces are
    global polynomials in x (not shifted to their subinterval).  A plain
    call at an interior knot takes the right-hand piece; use :meth:`limits`
    when the one-sided values matter.
    """

    __slots__ = ("_knots", "_pieces")

    def __init__(self, knots: Sequence[Scalar], pieces: Sequence[Polynomial]):
        knots = tuple(knots)
        pieces = tuple(as_polynomial(p) for p in pieces)
        if len(knots) < 2:
            raise DomainError("need at least the knots 0 and 1")
        if knots[0] != 0 or knots[-1] != 1:
            raise DomainError("knots must start at 0 and end at 1")
        if any(b <= a for a, b in zip(knots, knots[1:])):
            raise DomainError("knots must be strictly increasing")
        if len(pieces) != len(knots) - 1:
            raise DomainError(
                f"{len(pieces)} pieces given for {len(knots) - 1} subintervals"
            )
        self._knots = knots
        self._pieces = pieces

    @classmethod
    def from_polynomial(cls, p) -> "PiecewisePolynomial":
        p = as_polynomial(p)
        one = 1 if p.exact else 1.0
        return cls((0 * one, one), (p,))

    @classmethod
    def two_piece(cls, a: Scalar, left, right) -> "PiecewisePolynomial":
        """Pieces on [0, a] and [a, 1]."""
        if not 0 < a < 1:
            raise DomainError(f"knot a = {a} must lie in (0, 1)")
        return cls((0, a, 1), (as_polynomial(left), as_polynomial(right)))

    # -- properties -------------------------------------------------------
    @property
    def knots(self) -> tuple:
        return self._knots

    @property
    def pieces(self) -> tuple:
        return self._pieces

    @property
    def exact(self) -> bool:
        from .polynomial import is_exact_scalar

        return all(p.exact for p in self._pieces) and all(
            is_exact_scalar(t) for t in self._knots
        )

    @property
    def backend(self) -> str:
        return EXACT if self.exact else FLOAT

    @property
    def degree(self) -> int:
        return max(p.degree for p in self._pieces)

    def intervals(self):
        return list(zip(self._knots[:-1], self._knots[1:]))

    def __len__(self):
        return len(self._pieces)

    def __repr__(self):
        return f"PiecewisePolynomial(knots={list(self._knots)!r}, pieces={list(self._pieces)!r})"

    def __eq__(self, other):
        if not isinstance(other, PiecewisePolynomial):
            return NotImplemented
        return self._knots == other._knots and self._pieces == other._pieces

    def __hash__(self):
        return hash((self._knots, self._pieces))

    # -- evaluation -------------------------------------------------------
    def piece_index(self, x) -> int:
        if not 0 <= x <= 1:
            raise DomainError(f"x = {x} lies outside [0, 1]")
        i = bisect_right(self._knots, x) - 1
        return min(i, len(self._pieces) - 1)

    def __call__(self, x):
        return self._pieces[self.piece_index(x)](x)

    def limits(self, t):
        """``(left, right, jump)`` at t with jump = left - right.

        At 0 only the right limit exists and at 1 only the left one; the
        missing side is reported equal to the existing one.
        """
        if not 0 <= t <= 1:
            raise DomainError(f"t = {t} lies outside [0, 1]")
        i = bisect_right(self._knots, t) - 1
        if t == self._knots[0]:
            v = self._pieces[0](t)
            return v, v, v - v
        if t == self._knots[-1]:
            v = self._pieces[-1](t)
            return v, v, v - v
        if self._knots[i] == t:
            left = self._pieces[i - 1](t)
            right = self._pieces[i](t)
        else:
            left = right = self._pieces[i](t)
        return left, right, left - right

    def jumps(self):
        """``[(t, jump)]`` for every interior knot."""
        return [(t, self.limits(t)[2]) for t in self._knots[1:-1]]

    def evaluate(self, xs) -> np.ndarray:
        """Vectorised float evaluation (right-continuous at interior knots)."""
        xs = np.asarray(xs, dtype=float)
        idx = np.searchsorted(np.array([float(t) for t in self._knots]), xs, side="right") - 1
        idx = np.clip(idx, 0, len(self._pieces) - 1)
        out = np.empty_like(xs)
        for i, p in enumerate(self._pieces):
            mask = idx == i
            if mask.any():
                out[mask] = p.evaluate(xs[mask])
        return out

    # -- structure --------------------------------------------------------
    def refine(self, knots: Sequence[Scalar]) -> "PiecewisePolynomial":
        """Same function on a knot vector that contains the current one."""
        new = tuple(sorted(set(self._knots) | set(knots)))
        pieces = []
        for lo, hi in zip(new[:-1], new[1:]):
            pieces.append(self._pieces[self.piece_index(lo)])
        return PiecewisePolynomial(new, pieces)

    def _aligned(self, other: "PiecewisePolynomial"):
        if self._knots == other._knots:
            return self, other
        joint = sorted(set(self._knots) | set(other._knots))
        return self.refine(joint), other.refine(joint)

    def map(self, fn) -> "PiecewisePolynomial":
        return PiecewisePolynomial(self._knots, [fn(p) for p in self._pieces])

    def to_float(self) -> "PiecewisePolynomial":
        return PiecewisePolynomial(
            tuple(float(t) for t in self._knots), [p.to_float() for p in self._pieces]
        )

    # -- arithmetic -------------------------------------------------------
    def _binary(self, other, op):
        if isinstance(other, PiecewisePolynomial):
            a, b = self._aligned(other)
            return PiecewisePolynomial(
                a._knots, [op(p, q) for p, q in zip(a._pieces, b._pieces)]
            )
        if isinstance(other, (Polynomial, int, float, Fraction)):
            return PiecewisePolynomial(self._knots, [op(p, other) for p in self._pieces])
        return NotImplemented

    def __add__(self, other):
        return self._binary(other, lambda p, q: p + q)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda p, q: p - q)

    def __rsub__(self, other):
        return self._binary(other, lambda p, q: q - p)

    def __mul__(self, other):
        return self._binary(other, lambda p, q: p * q)

    __rmul__ = __mul__

    def __neg__(self):
        return self.map(lambda p: -p)

    def __pow__(self, m: int):
        return self.map(lambda p: p ** m)

    # -- calculus -------------------------------------------------------
    def derivative(self, m: int = 1) -> "PiecewisePolynomial":
        """Piecewise derivative; point masses at jumps are dropped."""
        return self.map(lambda p: p.derivative(m))

    def antiderivative(self, m: int = 1) -> "PiecewisePolynomial":
        """Continuous ``m``-fold antiderivative vanishing (to order m-1) at 0.

        Each fold integrates from 0, so the result equals
        ``int_0^x (x-t)^(m-1)/(m-1)! f(t) dt``.
        """
        cur = self
        for _ in range(m):
            pieces = []
            acc = 0
            for (lo, hi), p in zip(cur.intervals(), cur._pieces):
                P = p.antiderivative()
                shift = acc - P(lo)
                pieces.append(P + shift)
                acc = P(hi) + shift
            cur = PiecewisePolynomial(cur._knots, pieces)
        return cur

    def dump(self) -> dict:
        """JSON-ready ``{"knots": [...], "pieces": [[coeffs...], ...]}``.

        Exact values serialise as ``"p/q"`` strings.
        """
        def enc(v):
            if isinstance(v, Fraction):
                return f"{v.numerator}/{v.denominator}"
            if isinstance(v, int):
                return f"{v}/1"
            return float(v)

        return {
            "knots": [enc(t) for t in self._knots],
            "pieces": [[enc(c) for c in p.coeffs] for p in self._pieces],
        }


def exact_integral(f: PiecewisePolynomial, lo: Scalar = 0, hi: Scalar = 1):
    """Integral of f over [lo, hi], split at interior knots.

    Exact (a ``Fraction``) when f and the limits are exact.
    """
    if isinstance(f, Polynomial):
        f = PiecewisePolynomial.from_polynomial(f)
    if not 0 <= lo <= hi <= 1:
        raise DomainError(f"need 0 <= lo <= hi <= 1, got [{lo}, {hi}]")
    total = Fraction(0) if f.exact else 0.0
    for (a, b), p in zip(f.intervals(), f.pieces):
        s, e = max(a, lo), min(b, hi)
        if s >= e:
            continue
        F = p.antiderivative()
        total += F(e) - F(s)
    return total
