"""Polynomial engine: exact/float polynomials, Legendre family, roots, norms."""

from fractions import Fraction
from math import inf, sqrt

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from sharpconst.errors import DomainError, DegreeOverflowError
from sharpconst.polycore import (
    MAX_DEGREE,
    PiecewisePolynomial,
    Polynomial,
    exact_integral,
    isolate_roots,
    legendre,
    legendre_antiderivative,
    legendre_values,
    lq_integral,
    lq_norm,
    poly_calculus,
    poly_eval,
    sup_norm,
)

X = sp.Symbol("x")


def to_sympy(p: Polynomial):
    return sum(sp.Rational(c) * X ** i for i, c in enumerate(p.coeffs))


def sympy_legendre(m):
    # shifted Rodrigues form, built independently of the package
    return sp.expand(sp.diff((X ** 2 - X) ** m, X, m) / sp.factorial(m))


small_int = st.integers(-20, 20)
exact_poly = st.lists(small_int, min_size=1, max_size=8).map(Polynomial)


# -- poly_eval / poly_calculus ---------------------------------------------------

def test_poly_eval_examples():
    assert poly_eval(Polynomial([-1, 2]), Fraction(1, 2)) == 0
    assert poly_eval(Polynomial([1]), Fraction(3, 10)) == 1
    assert poly_eval(Polynomial([1, -6, 6]), 0) == 1


def test_poly_eval_exact_backend_returns_fraction():
    v = poly_eval(Polynomial([1, 1, 1]), Fraction(1, 3))
    assert isinstance(v, Fraction) and v == Fraction(13, 9)


def test_poly_eval_outside_domain():
    with pytest.raises(DomainError):
        poly_eval(Polynomial([1, 2]), 1.5)


def test_poly_calculus_examples():
    assert poly_calculus(Polynomial([0, 0, 1]), 1) == Polynomial([0, 2])
    assert poly_calculus(Polynomial([-1, 2]), -1) == Polynomial([0, -1, 1])
    assert poly_calculus(Polynomial([0, 0, 0, 1]), 3) == Polynomial([6])
    p = Polynomial([3, 1])
    assert poly_calculus(p, 0) == p


@given(exact_poly, st.integers(1, 5))
def test_calculus_round_trip(p, m):
    assert poly_calculus(poly_calculus(p, -m), m) == p


@given(exact_poly, exact_poly)
def test_arithmetic_matches_sympy(p, q):
    assert sp.expand(to_sympy(p * q) - to_sympy(p) * to_sympy(q)) == 0
    assert sp.expand(to_sympy(p - q) - (to_sympy(p) - to_sympy(q))) == 0


def test_degree_cap():
    with pytest.raises(DegreeOverflowError):
        Polynomial.monomial(MAX_DEGREE + 1)


# -- Legendre family ---------------------------------------------------------------

@pytest.mark.parametrize("m", range(0, 9))
def test_legendre_matches_rodrigues_oracle(m):
    assert sp.expand(to_sympy(legendre(m)) - sympy_legendre(m)) == 0


def test_legendre_examples():
    assert legendre(0) == Polynomial([1])
    assert legendre(1) == Polynomial([-1, 2])
    assert legendre(2) == Polynomial([1, -6, 6])


def test_legendre_antiderivative_examples():
    assert legendre_antiderivative(1, 1) == Polynomial([0, -1, 1])
    assert legendre_antiderivative(2, 0) == Polynomial([1, -6, 6])
    P = legendre_antiderivative(2, 1)
    assert P(0) == 0 and P(1) == 0


def test_legendre_orthogonality_exact():
    for i in range(13):
        for j in range(13):
            v = exact_integral(PiecewisePolynomial.from_polynomial(legendre(i) * legendre(j)))
            assert v == (Fraction(1, 2 * i + 1) if i == j else 0)


def test_legendre_antiderivative_boundary_vanishing():
    for m in range(1, 13):
        for j in range(1, m + 1):
            P = legendre_antiderivative(m, j)
            assert P(0) == 0 and P(1) == 0


def test_legendre_orthogonal_to_low_powers():
    for m in range(1, 13):
        for j in range(m):
            f = PiecewisePolynomial.from_polynomial(legendre(m) * Polynomial.monomial(j))
            assert exact_integral(f) == 0


def test_legendre_values_float_recurrence():
    x = np.linspace(0, 1, 17)
    vals = legendre_values(10, x)
    for m in range(11):
        assert np.allclose(vals[m], legendre(m).to_float().evaluate(x), atol=1e-12)


# -- integrals, roots, norms -----------------------------------------------------------

def test_exact_integral_examples():
    P1, P2 = legendre(1), legendre(2)
    assert exact_integral(PiecewisePolynomial.from_polynomial(P1 * P1)) == Fraction(1, 3)
    assert exact_integral(PiecewisePolynomial.from_polynomial(P2 * P2)) == Fraction(1, 5)
    zero = PiecewisePolynomial.from_polynomial(Polynomial([0]))
    assert exact_integral(zero, Fraction(1, 5), Fraction(3, 5)) == 0


def test_roots_examples():
    roots = isolate_roots(Polynomial([-1, 2]))
    assert [r.point for r in roots] == [Fraction(1, 2)]
    (r,) = isolate_roots(Polynomial([-1, 2]) ** 2)
    assert r.point == Fraction(1, 2) and r.even and not r.sign_change
    assert isolate_roots(Polynomial([1])) == []


def test_float_double_root_flagged_even():
    (r,) = isolate_roots(PiecewisePolynomial.from_polynomial(Polynomial([1.0, -4.0, 4.0])))
    assert abs(r.point - 0.5) < 1e-7 and r.even


def test_roots_match_sympy_on_products():
    rng = np.random.default_rng(3)
    for _ in range(20):
        rts = sorted(Fraction(int(v), 97) for v in rng.choice(np.arange(1, 97), 4, replace=False))
        p = Polynomial([1])
        for t in rts:
            p = p * Polynomial([-t, 1])
        found = [r.point for r in isolate_roots(p)]
        assert found == rts
        fl = [r.point for r in isolate_roots(PiecewisePolynomial.from_polynomial(p.to_float()))]
        assert np.allclose(fl, [float(t) for t in rts], atol=1e-10)


def test_jump_reported_as_sign_change():
    f = PiecewisePolynomial.two_piece(Fraction(3, 10), Polynomial([Fraction(7, 10)]), Polynomial([Fraction(-3, 10)]))
    (r,) = isolate_roots(f)
    assert r.kind == "jump" and r.sign_change


def test_lq_norm_examples():
    f = Polynomial([-1, 2])
    assert lq_norm(f, 1) == pytest.approx(0.5, abs=1e-14)
    assert lq_norm(f, 2) == pytest.approx(1 / sqrt(3), rel=1e-14)
    step = PiecewisePolynomial.two_piece(Fraction(3, 10), Polynomial([Fraction(7, 10)]), Polynomial([Fraction(-3, 10)]))
    assert lq_norm(step, inf) == pytest.approx(0.7, abs=1e-15)
    with pytest.raises(DomainError):
        lq_norm(f, 0.5)


def _random_piecewise(rng, exact=True):
    knot = Fraction(int(rng.integers(1, 20)), 20)
    draw = lambda: Polynomial([int(v) for v in rng.integers(-9, 10, size=int(rng.integers(1, 7)))])
    f = PiecewisePolynomial.two_piece(knot, draw(), draw())
    return f if exact else f.to_float()


def test_lq_monotone_in_q():
    rng = np.random.default_rng(11)
    qs = [1, 1.5, 2, 3, 4.5, 7, inf]
    for _ in range(15):
        f = _random_piecewise(rng, exact=False)
        norms = [lq_norm(f, q) for q in qs]
        for lo, hi in zip(norms, norms[1:]):
            assert lo <= hi * (1 + 1e-10) + 1e-14


@pytest.mark.parametrize("q", [1, 2, 3, 4])
def test_float_matches_exact_integer_q(q):
    rng = np.random.default_rng(q)
    for _ in range(10):
        deg = int(rng.integers(1, 13))
        p = Polynomial([int(v) for v in rng.integers(-9, 10, size=deg + 1)])
        f = PiecewisePolynomial.from_polynomial(p)
        exact = float(lq_integral(f, q))
        approx = float(lq_integral(f.to_float(), q))
        assert approx == pytest.approx(exact, rel=1e-12)


def test_lq_integral_against_sympy_abs():
    # |x^2 - 1/4|^3 split at the root, integrated symbolically
    p = Polynomial([Fraction(-1, 4), 0, 1])
    expr = to_sympy(p)
    want = sp.integrate(-(expr ** 3), (X, 0, sp.Rational(1, 2))) + sp.integrate(expr ** 3, (X, sp.Rational(1, 2), 1))
    assert lq_integral(PiecewisePolynomial.from_polynomial(p), 3) == Fraction(str(want))
    assert float(lq_integral(PiecewisePolynomial.from_polynomial(p.to_float()), 3)) == pytest.approx(float(want), rel=1e-12)


def test_sup_norm_matches_dense_sampling():
    rng = np.random.default_rng(5)
    for _ in range(10):
        f = _random_piecewise(rng, exact=False)
        xs = np.linspace(0, 1, 200001)
        dense = np.max(np.abs(f.evaluate(xs)))
        # limits at the knot count, so the sup is at least the sampled max
        assert sup_norm(f) >= dense - 1e-12
        assert sup_norm(f) <= dense + 1e-3 * max(1.0, dense)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-9, 9), min_size=2, max_size=6), st.floats(1.0, 6.0))
def test_lq_norm_homogeneous(coeffs, q):
    f = PiecewisePolynomial.from_polynomial(Polynomial([float(c) for c in coeffs]))
    assert lq_norm(f * 3.0, q) == pytest.approx(3.0 * lq_norm(f, q), rel=1e-10, abs=1e-14)
