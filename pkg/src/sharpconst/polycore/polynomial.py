"""Dense univariate polynomials with an exact-rational or float64 backend.

Coefficients are stored in ascending order.  The exact backend keeps
``fractions.Fraction`` values and is closed under every operation here; the
float backend stores Python floats and hands vectorised evaluation to the
compiled kernels.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from numbers import Rational
from typing import Iterable, Sequence, Union

import numpy as np

from .. import _accel
from ..errors import DegreeOverflowError, DomainError

Scalar = Union[int, Fraction, float]

MAX_DEGREE = 64
EXACT = "exact"
FLOAT = "float"


def is_exact_scalar(v) -> bool:
    return isinstance(v, Rational)


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    return Fraction(float(v))


class Polynomial:
    """Immutable dense polynomial ``sum c[i] x**i``.

    Parameters
    ----------
    coeffs : iterable of scalars
        Ascending-order coefficients.
    backend : {"exact", "float"}, optional
        Inferred from the coefficient types when omitted: all ints or
        Fractions give the exact backend, anything else gives float.
    """

    __slots__ = ("_c", "_backend", "_arr")

    def __init__(self, coeffs: Iterable[Scalar], backend: str | None = None):
        cs = list(coeffs)
        if backend is None:
            backend = EXACT if all(is_exact_scalar(c) for c in cs) else FLOAT
        if backend == EXACT:
            cs = [_as_fraction(c) for c in cs]
        elif backend == FLOAT:
            cs = [float(c) for c in cs]
        else:
            raise ValueError(f"unknown backend {backend!r}")
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        if not cs:
            cs = [Fraction(0) if backend == EXACT else 0.0]
        if len(cs) - 1 > MAX_DEGREE:
            raise DegreeOverflowError(
                f"degree {len(cs) - 1} exceeds the cap of {MAX_DEGREE}"
            )
        self._c = tuple(cs)
        self._backend = backend
        self._arr = None

    # -- construction helpers -------------------------------------------
    @classmethod
    def constant(cls, c: Scalar) -> "Polynomial":
        return cls([c])

    @classmethod
    def monomial(cls, degree: int, c: Scalar = 1) -> "Polynomial":
        return cls([0] * degree + [c])

    @classmethod
    def linear_shift(cls, a: Scalar) -> "Polynomial":
        """The polynomial ``x - a``."""
        return cls([-a, 1])

    # -- basic properties -------------------------------------------------
    @property
    def coeffs(self) -> tuple:
        return self._c

    @property
    def backend(self) -> str:
        return self._backend

    @property
    def exact(self) -> bool:
        return self._backend == EXACT

    @property
    def degree(self) -> int:
        return len(self._c) - 1

    @property
    def array(self) -> np.ndarray:
        """Float64 coefficient array (read-only, cached)."""
        if self._arr is None:
            arr = np.array([float(c) for c in self._c], dtype=float)
            arr.setflags(write=False)
            self._arr = arr
        return self._arr

    def is_zero(self) -> bool:
        return len(self._c) == 1 and self._c[0] == 0

    def leading(self) -> Scalar:
        return self._c[-1]

    # -- evaluation -------------------------------------------------------
    def __call__(self, x):
        """Horner evaluation at a scalar, without a domain check."""
        acc = self._c[-1]
        for c in self._c[-2::-1]:
            acc = acc * x + c
        return acc

    def evaluate(self, xs) -> np.ndarray:
        """Float evaluation on an array of points."""
        return _accel.horner(self.array, xs)

    # -- conversion -------------------------------------------------------
    def to_float(self) -> "Polynomial":
        if self._backend == FLOAT:
            return self
        return Polynomial(self._c, FLOAT)

    def to_exact(self) -> "Polynomial":
        if self._backend == EXACT:
            return self
        return Polynomial(self._c, EXACT)

    # -- arithmetic -------------------------------------------------------
    @staticmethod
    def _lift(other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, float, Fraction, np.floating, np.integer)):
            return Polynomial([other])
        return NotImplemented

    @staticmethod
    def _join(a: "Polynomial", b: "Polynomial") -> str:
        return EXACT if (a.exact and b.exact) else FLOAT

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        n = max(len(self._c), len(o._c))
        zero = 0
        a = list(self._c) + [zero] * (n - len(self._c))
        b = list(o._c) + [zero] * (n - len(o._c))
        return Polynomial([x + y for x, y in zip(a, b)], self._join(self, o))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial([-c for c in self._c], self._backend)

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        backend = self._join(self, o)
        if backend == FLOAT:
            return Polynomial(np.convolve(self.array, o.array), FLOAT)
        out = [Fraction(0)] * (len(self._c) + len(o._c) - 1)
        for i, x in enumerate(self._c):
            if x == 0:
                continue
            for j, y in enumerate(o._c):
                out[i + j] += x * y
        return Polynomial(out, EXACT)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if isinstance(scalar, Polynomial):
            return NotImplemented
        if self.exact and is_exact_scalar(scalar):
            s = _as_fraction(scalar)
            return Polynomial([c / s for c in self._c], EXACT)
        return Polynomial([float(c) / float(scalar) for c in self._c], FLOAT)

    def __pow__(self, m: int):
        if not isinstance(m, int) or m < 0:
            raise DomainError("polynomial powers must be non-negative integers")
        if self.degree * m > MAX_DEGREE:
            raise DegreeOverflowError(
                f"degree {self.degree * m} exceeds the cap of {MAX_DEGREE}"
            )
        result = Polynomial([1], self._backend)
        base = self
        while m:
            if m & 1:
                result = result * base
            base = base * base if m > 1 else base
            m >>= 1
        return result

    def __eq__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return self._c == o._c

    def __hash__(self):
        return hash(self._c)

    def __repr__(self):
        return f"Polynomial({list(self._c)!r}, backend={self._backend!r})"

    def compose(self, inner: "Polynomial") -> "Polynomial":
        """``self(inner(x))`` by Horner's scheme on polynomials."""
        acc = Polynomial([self._c[-1]], self._backend)
        for c in self._c[-2::-1]:
            acc = acc * inner + c
        return acc

    # -- calculus -------------------------------------------------------
    def derivative(self, m: int = 1) -> "Polynomial":
        cs = list(self._c)
        for _ in range(m):
            if len(cs) <= 1:
                cs = [0]
                break
            cs = [i * cs[i] for i in range(1, len(cs))]
        return Polynomial(cs, self._backend)

    def antiderivative(self, m: int = 1) -> "Polynomial":
        """``m``-fold antiderivative with every integration constant zero."""
        if self.degree + m > MAX_DEGREE:
            raise DegreeOverflowError(
                f"degree {self.degree + m} exceeds the cap of {MAX_DEGREE}"
            )
        cs = list(self._c)
        for _ in range(m):
            if self.exact:
                cs = [Fraction(0)] + [c / (i + 1) for i, c in enumerate(cs)]
            else:
                cs = [0.0] + [c / (i + 1) for i, c in enumerate(cs)]
        return Polynomial(cs, self._backend)

    def integral(self, lo, hi):
        F = self.antiderivative()
        return F(hi) - F(lo)


def poly_eval(p: Polynomial, x: Scalar):
    """Value of ``p`` at ``x`` in [0, 1]; exact input gives an exact result."""
    if not 0 <= x <= 1:
        raise DomainError(f"x = {x} lies outside [0, 1]")
    return p(x)


def poly_calculus(p: Polynomial, order: int) -> Polynomial:
    """Derivative (order > 0) or zero-constant antiderivative (order < 0)."""
    if abs(order) > MAX_DEGREE:
        raise DomainError(f"|order| = {abs(order)} exceeds {MAX_DEGREE}")
    if order > 0:
        return p.derivative(order)
    if order < 0:
        return p.antiderivative(-order)
    return p


_X2_MINUS_X = Polynomial([0, -1, 1])


def legendre(m: int) -> Polynomial:
    """Shifted Legendre polynomial on [0, 1], ``(1/m!) ((x^2-x)^m)^(m)``."""
    return legendre_antiderivative(m, 0)


def legendre_antiderivative(m: int, j: int) -> Polynomial:
    """``(1/m!) ((x^2-x)^m)^(m-j)`` for 0 <= j <= m, exact coefficients.

    For j >= 1 this is the j-fold antiderivative of ``legendre(m)`` that
    vanishes, with its first j-1 derivatives, at both ends of [0, 1].
    """
    if m < 0:
        raise DomainError("Legendre index must be non-negative")
    if not 0 <= j <= m:
        raise DomainError(f"antiderivative order j={j} must satisfy 0 <= j <= m={m}")
    if 2 * m > MAX_DEGREE:
        raise DegreeOverflowError(f"(x^2-x)^{m} exceeds the degree cap")
    return (_X2_MINUS_X ** m).derivative(m - j) / factorial(m)


def legendre_values(M: int, x) -> np.ndarray:
    """Float values ``P_0(x) .. P_M(x)`` via the three-term recurrence.

    ``x`` may be an array; the result has shape ``(M + 1,) + x.shape``.
    """
    x = np.asarray(x, dtype=float)
    t = 2.0 * x - 1.0
    out = np.empty((M + 1,) + x.shape)
    out[0] = 1.0
    if M >= 1:
        out[1] = t
    for m in range(1, M):
        out[m + 1] = ((2 * m + 1) * t * out[m] - m * out[m - 1]) / (m + 1)
    return out


def legendre_antiderivative_values(M: int, j: int, x) -> np.ndarray:
    """Float values of ``P_m^(-j)(x)`` for m = 0..M (NaN where m < j).

    Uses ``P_m^(-i) = (P_{m+1}^(-(i-1)) - P_{m-1}^(-(i-1))) / (2(2m+1))``,
    valid for i <= m, which stays accurate for large m where the monomial
    coefficients would cancel catastrophically.
    """
    if j < 0:
        raise DomainError("antiderivative order must be non-negative")
    x = np.asarray(x, dtype=float)
    cur = legendre_values(M + j, x)
    for i in range(1, j + 1):
        nxt = np.full_like(cur, np.nan)
        top = M + j - i
        for m in range(i, top + 1):
            nxt[m] = (cur[m + 1] - cur[m - 1]) / (2.0 * (2 * m + 1))
        cur = nxt
    return cur[: M + 1]


def as_polynomial(v) -> Polynomial:
    return v if isinstance(v, Polynomial) else Polynomial([v])


def float_coeffs(polys: Sequence[Polynomial], width: int) -> np.ndarray:
    """Stack float coefficient arrays, zero padded to ``width`` columns."""
    out = np.zeros((len(polys), width))
    for i, p in enumerate(polys):
        out[i, : len(p.array)] = p.array
    return out
