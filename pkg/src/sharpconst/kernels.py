"""Two-piece kernels that represent the functional y -> y^(k)(a).

Every object lives on [0, 1] with a single interior knot at a:

* ``spline_S``: the fixed jump part, ``(a-x)^(n-k-1)/(n-k-1)!`` on [0, a)
  and 0 on (a, 1];
* ``build_Q``: ``spline_S`` plus an arbitrary element of P_{n-1}, written
  in the shifted basis ``(x-a)^j`` with coefficients nu;
* ``kernel_g``: the Riesz representer of the functional in the p = 2
  space; its n-th derivative is the member of the Q family orthogonal to
  P_{n-1}.

Exact (rational) ``a`` keeps every construction in exact arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial, inf
from typing import Sequence

import numpy as np

from .errors import DomainError, MomentError
from .polycore import (
    PiecewisePolynomial,
    Polynomial,
    exact_integral,
    legendre_antiderivative,
    legendre_antiderivative_values,
)
from .polycore.polynomial import is_exact_scalar

MOMENT_TOL = 1e-12


def conjugate_exponent(p):
    """q with 1/p + 1/q = 1 (1 <-> inf)."""
    if p == inf:
        return 1
    if p == 1:
        return inf
    if p < 1:
        raise DomainError(f"p = {p} < 1")
    if is_exact_scalar(p):
        p = Fraction(p)
        return p / (p - 1)
    return p / (p - 1.0)


def _check_nk(n: int, k: int) -> None:
    if n < 1:
        raise DomainError(f"n = {n} must be >= 1")
    if not 0 <= k <= n - 1:
        raise DomainError(f"k = {k} must satisfy 0 <= k <= n-1 = {n - 1}")


def _check_a(a) -> None:
    if not 0 < a < 1:
        raise DomainError(f"a = {a} must lie in (0, 1)")


@dataclass(frozen=True)
class ProblemSpec:
    """One pointwise problem: bound ``|y^(k)(a)|`` by ``||y^(n)||_p``."""

    n: int
    k: int
    p: object
    a: object

    def __post_init__(self):
        _check_nk(self.n, self.k)
        _check_a(self.a)
        if not (self.p == inf or self.p >= 1):
            raise DomainError(f"p = {self.p} must be >= 1 or inf")

    @property
    def q(self):
        """Conjugate exponent p'."""
        return conjugate_exponent(self.p)


def h_poly(n: int, k: int, a) -> Polynomial:
    """The auxiliary polynomial in x whose coefficients are polynomial in a.

    ``sum_l (-1)^(n-1-l) C(2n-1-k, n-1-l) x^(n-1-l) a^l sum_{m<=l} C(n-1+m, m) x^m``
    """
    _check_nk(n, k)
    coeffs = [0] * n
    for l in range(n):
        outer = (-1) ** (n - 1 - l) * comb(2 * n - 1 - k, n - 1 - l) * a ** l
        for m in range(l + 1):
            coeffs[n - 1 - l + m] += outer * comb(n - 1 + m, m)
    return Polynomial(coeffs)


def kernel_g(n: int, k: int, a) -> PiecewisePolynomial:
    """Representer g_{n,k}(., a): ``int f^(n) g^(n) = f^(k)(a)`` on the Dirichlet space."""
    _check_nk(n, k)
    _check_a(a)
    scale = Fraction(1, factorial(2 * n - k - 1))
    one_minus_x = Polynomial([1, -1])
    x_n = Polynomial.monomial(n)
    left = (
        (-1) ** (n - k - 1) * scale * (1 - a) ** (n - k)
        * x_n * h_poly(n, k, 1 - a).compose(one_minus_x)
    )
    right = (-1) ** (n - 1) * scale * a ** (n - k) * one_minus_x ** n * h_poly(n, k, a)
    return PiecewisePolynomial.two_piece(a, left, right)


def kernel_g_deriv_n(n: int, k: int, a) -> PiecewisePolynomial:
    """n-th x-derivative of :func:`kernel_g`; degree <= n-1 on each piece."""
    return kernel_g(n, k, a).derivative(n)


def _shift_term(n: int, l: int, a) -> Polynomial:
    """``(-1)^(n-1-l) (x-a)^(n-1-l) / (n-1-l)!``."""
    e = n - 1 - l
    return (-1) ** e * Polynomial.linear_shift(a) ** e / factorial(e)


def spline_S(n: int, k: int, a) -> PiecewisePolynomial:
    _check_nk(n, k)
    _check_a(a)
    left = _shift_term(n, k, a)
    zero = Polynomial([0], left.backend)
    return PiecewisePolynomial.two_piece(a, left, zero)


def build_Q(spec: ProblemSpec, nu: Sequence) -> PiecewisePolynomial:
    """n-th derivative of a representing spline for parameters nu_0..nu_{n-1}."""
    n, k, a = spec.n, spec.k, spec.a
    nu = list(nu)
    if len(nu) != n:
        raise DomainError(f"nu must have exactly n = {n} entries, got {len(nu)}")
    terms = [_shift_term(n, l, a) for l in range(n)]
    right = sum((nu[l] * terms[l] for l in range(n)), Polynomial([0]))
    left = sum(
        ((nu[l] + 1 if l == k else nu[l]) * terms[l] for l in range(n)),
        Polynomial([0]),
    )
    return PiecewisePolynomial.two_piece(a, left, right)


def nu_from_correction(n: int, a, u: Polynomial) -> list:
    """Coordinates nu of ``u`` in the basis used by :func:`build_Q`.

    ``build_Q(spec, nu)`` is ``spline_S`` plus ``sum nu_l T_l`` with
    ``T_l = (-1)^e (x-a)^e / e!``, e = n-1-l; matching Taylor coefficients
    at a gives ``nu_l = (-1)^e u^(e)(a)``.
    """
    nu = [0] * n
    for l in range(n):
        e = n - 1 - l
        nu[l] = (-1) ** e * u.derivative(e)(a)
    return nu


def legendre_coeffs_of_g(n: int, k: int, a, M: int) -> list:
    """``alpha_m = (2m+1) P_m^(k-n)(a)`` for m = n..M.

    These are the Legendre coefficients of ``kernel_g_deriv_n``; the
    coefficients with m < n vanish.  Exact for rational a while the
    Rodrigues form fits the degree cap, float otherwise.
    """
    _check_nk(n, k)
    _check_a(a)
    if M < n:
        raise DomainError(f"M = {M} must be >= n = {n}")
    j = n - k
    if is_exact_scalar(a) and 2 * M <= 64:
        return [(2 * m + 1) * legendre_antiderivative(m, j)(a) for m in range(n, M + 1)]
    vals = legendre_antiderivative_values(M, j, float(a))
    return [float((2 * m + 1) * vals[m]) for m in range(n, M + 1)]


class AdmissibleFunction:
    """y with ``y^(n) = h`` and zero Dirichlet data of order < n at 0 and 1.

    Derivatives of every order up to n are exact piecewise polynomials.
    """

    def __init__(self, h: PiecewisePolynomial, n: int):
        self.h = h
        self.n = n
        self._derivs = {n: h}

    def derivative(self, j: int) -> PiecewisePolynomial:
        if not 0 <= j <= self.n:
            raise DomainError(f"derivative order {j} outside 0..{self.n}")
        if j not in self._derivs:
            self._derivs[j] = self.h.antiderivative(self.n - j)
        return self._derivs[j]

    @property
    def y(self) -> PiecewisePolynomial:
        return self.derivative(0)

    def __call__(self, x):
        return self.y(x)


def moments(h: PiecewisePolynomial, count: int) -> list:
    """``[int_0^1 x^j h dx for j < count]``."""
    return [
        exact_integral(h * Polynomial.monomial(j), 0, 1) for j in range(count)
    ]


def test_function_from(h, n: int, tol: float = MOMENT_TOL) -> AdmissibleFunction:
    """Build y in the Dirichlet space with ``y^(n) = h``.

    The n-fold antiderivative from 0 already vanishes at 0 to order n-1; the
    conditions at 1 hold exactly when h is orthogonal to 1, x, ..., x^(n-1),
    which is checked first.

    Raises
    ------
    MomentError
        When some moment exceeds ``tol`` in absolute value.
    """
    if isinstance(h, Polynomial):
        h = PiecewisePolynomial.from_polynomial(h)
    for j, mj in enumerate(moments(h, n)):
        if abs(mj) > tol:
            raise MomentError(
                f"moment {j} of h is {float(mj):.3e}, not zero", index=j, value=float(mj)
            )
    return AdmissibleFunction(h, n)


test_function_from.__test__ = False  # keep pytest from collecting it


def functional_value(h: PiecewisePolynomial, Q: PiecewisePolynomial):
    """``int_0^1 h Q dx``, the right side of the representation identity."""
    return exact_integral(h * Q, 0, 1)


def taylor_left(h: PiecewisePolynomial, n: int, k: int, a):
    """``int_0^a h(t) (a-t)^(n-k-1)/(n-k-1)! dt``."""
    e = n - k - 1
    ker = (-1) ** e * Polynomial.linear_shift(a) ** e / factorial(e)
    return exact_integral(h * ker, 0, a)


def taylor_right(h: PiecewisePolynomial, n: int, k: int, a):
    """``(-1)^(n-k) int_a^1 h(t) (t-a)^(n-k-1)/(n-k-1)! dt``."""
    e = n - k - 1
    ker = Polynomial.linear_shift(a) ** e / factorial(e)
    return (-1) ** (n - k) * exact_integral(h * ker, a, 1)


def project_out_low_degree(h: PiecewisePolynomial, n: int) -> PiecewisePolynomial:
    """``h`` minus its L2 projection onto P_{n-1} (Legendre expansion)."""
    from .polycore import legendre

    out = h
    for m in range(n):
        Pm = legendre(m)
        c = (2 * m + 1) * exact_integral(h * Pm, 0, 1)
        out = out - c * Pm
    return out


def random_admissible(n: int, rng: np.random.Generator, degree: int | None = None,
                      knot=None) -> PiecewisePolynomial:
    """Random h with vanishing moments of order < n.

    Integer-coefficient pieces (one per side of ``knot`` when given) are
    drawn and then orthogonalised against P_{n-1}, all in exact arithmetic.
    """
    degree = n + 3 if degree is None else degree

    def draw():
        return Polynomial([int(c) for c in rng.integers(-9, 10, size=degree + 1)])

    if knot is None:
        h = PiecewisePolynomial.from_polynomial(draw())
    else:
        h = PiecewisePolynomial.two_piece(knot, draw(), draw())
    return project_out_low_degree(h, n)


def kernel_dump(spec: ProblemSpec, nu: Sequence | None = None) -> dict:
    """JSON-ready dump of g, g^(n), S and (if nu is given) Q."""
    n, k, a = spec.n, spec.k, spec.a
    out = {
        "schema": 1,
        "n": n,
        "k": k,
        "a": float(a),
        "g": kernel_g(n, k, a).dump(),
        "g_n": kernel_g_deriv_n(n, k, a).dump(),
        "S": spline_S(n, k, a).dump(),
    }
    if nu is not None:
        out["nu"] = [float(v) for v in nu]
        out["Q"] = build_Q(spec, nu).dump()
    return out
