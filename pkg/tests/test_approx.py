from fractions import Fraction
from math import inf, sqrt

import numpy as np
import pytest

from sharpconst.approx.solvers import (
    best_approx,
    best_approx_l1,
    best_approx_linf,
    best_approx_smooth,
    legendre_projection,
    residual_orthogonality,
)
from sharpconst.constants import A_solution, A_value, exact_A2, extremal_witness, series_A2
from sharpconst.errors import DomainError, MomentError
from sharpconst.kernels import (
    ProblemSpec,
    build_Q,
    kernel_g_deriv_n,
    nu_from_correction,
    spline_S,
)
from sharpconst.polycore import (
    PiecewisePolynomial,
    Polynomial,
    exact_integral,
    legendre,
    lq_norm,
)


def step(a, left, right):
    return PiecewisePolynomial.two_piece(Fraction(a), Polynomial([Fraction(left)]), Polynomial([Fraction(right)]))


def brute_force_constant(f, q, lo=-1.5, hi=1.5, npts=3001):
    cs = np.linspace(lo, hi, npts)
    vals = [lq_norm(f.to_float() - float(c), q) for c in cs]
    i = int(np.argmin(vals))
    return cs[i], vals[i]


# -- examples --------------------------------------------------------------------

def test_l1_indicator():
    f = step(Fraction(3, 10), 1, 0)
    sol = best_approx(f, 0, 1)
    assert sol.value == pytest.approx(0.3, abs=1e-10)
    assert abs(sol.correction(0.5)) < 1e-8
    _, v = brute_force_constant(f, 1)
    assert sol.value <= v + 1e-12


def test_linf_step():
    f = step(Fraction(3, 10), Fraction(7, 10), Fraction(-3, 10))
    sol = best_approx(f, 0, inf)
    assert sol.value == pytest.approx(0.5, abs=1e-10)
    assert sol.correction(0.5) == pytest.approx(0.2, abs=1e-9)


def test_l2_kernel_half():
    sol = best_approx(kernel_g_deriv_n(1, 0, Fraction(1, 2)), 0, 2)
    assert sol.value == pytest.approx(0.5, rel=1e-14)


def test_l2_is_projection():
    f = kernel_g_deriv_n(3, 1, Fraction(2, 7)) + PiecewisePolynomial.from_polynomial(Polynomial([1, 2, 3]))
    sol = best_approx_smooth(f, 2, 2)
    assert np.allclose(sol.coeffs, legendre_projection(f, 2), rtol=1e-12, atol=1e-14)


def test_l2_of_g_is_zero_correction_and_series():
    a = Fraction(1, 2)
    sol = best_approx_smooth(kernel_g_deriv_n(2, 1, a), 1, 2)
    assert np.max(np.abs(sol.coeffs)) < 1e-14
    exact = float(exact_A2(2, 1, a))
    assert sol.value ** 2 == pytest.approx(exact, rel=1e-12)
    # partial sums stay below the value; for k = n-1 the tail decays like c/M
    partial = {M: float(series_A2(2, 1, a, M)) for M in (100, 200, 400)}
    assert all(v <= exact for v in partial.values())
    scaled = [M * (exact - v) for M, v in partial.items()]
    assert max(scaled) / min(scaled) < 1.01
    extrapolated = partial[200] + 2 * (partial[400] - partial[200])
    assert abs(extrapolated - exact) < 2e-6


def test_lq_odd_symmetry():
    sol = best_approx_smooth(Polynomial([-1.0, 2.0]), 0, 4)
    assert abs(sol.coeffs[0]) < 1e-12


def test_l1_examples():
    assert best_approx_l1(step(Fraction(1, 2), 1, 0), 0).value == pytest.approx(0.5, abs=1e-10)
    assert best_approx_l1(step(Fraction(1, 5), 1, 0), 0).value == pytest.approx(0.2, abs=1e-10)
    p = PiecewisePolynomial.from_polynomial(Polynomial([1.0, -2.0, 0.5]))
    sol = best_approx_l1(p, 2)
    assert sol.value < 1e-10


@pytest.mark.parametrize("a", [0.1, 0.35, 0.5, 0.9])
def test_linf_unit_jump(a):
    f = step(Fraction(a).limit_denominator(100), 1 - Fraction(a).limit_denominator(100), -Fraction(a).limit_denominator(100))
    sol = best_approx_linf(f, 0)
    assert sol.value == pytest.approx(0.5, abs=1e-10)
    assert sol.correction(0.3) == pytest.approx(0.5 - a, abs=1e-9)


def test_linf_polynomial_exact():
    sol = best_approx_linf(PiecewisePolynomial.from_polynomial(Polynomial([-1.0, 2.0])), 1)
    assert sol.value < 1e-12


def test_unit_jump_lower_bound():
    rng = np.random.default_rng(8)
    for _ in range(8):
        t = Fraction(int(rng.integers(1, 20)), 20)
        left = Polynomial([int(v) for v in rng.integers(-3, 4, size=3)])
        f = PiecewisePolynomial.two_piece(t, left + 1, left)  # jump of exactly 1
        deg = int(rng.integers(0, 3))
        assert best_approx_linf(f, deg).value >= 0.5 - 1e-9


# -- optimality conditions -------------------------------------------------------

def test_orthogonality_examples():
    rng = np.random.default_rng(2)
    for q in (1.5, 3.0, 4.0):
        f = kernel_g_deriv_n(3, 1, 0.3) + PiecewisePolynomial.from_polynomial(
            Polynomial(list(rng.normal(size=3))))
        sol = best_approx_smooth(f, 2, q)
        d = residual_orthogonality(sol.residual, q, 2)
        assert np.max(np.abs(d)) <= 1e-9 * sol.value ** (q - 1)
    for n in range(1, 6):
        r = PiecewisePolynomial.from_polynomial(legendre(n))
        assert all(v == 0 for v in residual_orthogonality(r, 2, n - 1))
    g = kernel_g_deriv_n(2, 0, 0.3)
    assert np.max(np.abs(residual_orthogonality(g + 0.05, 3, 1))) > 1e-6


# -- properties -----------------------------------------------------------------

@pytest.mark.parametrize("q", [1, 1.5, 2, 3, inf])
def test_convexity_certificate(q):
    rng = np.random.default_rng(int(q * 10) if q != inf else 99)
    f = kernel_g_deriv_n(3, 2, 0.4)
    for _ in range(10):
        u1 = Polynomial(list(rng.normal(size=3)))
        u2 = Polynomial(list(rng.normal(size=3)))
        lam = float(rng.uniform(0.05, 0.95))
        mix = lam * u1 + (1 - lam) * u2
        lhs = lq_norm(f - mix, q)
        rhs = lam * lq_norm(f - u1, q) + (1 - lam) * lq_norm(f - u2, q)
        assert lhs <= rhs + 1e-12


@pytest.mark.parametrize("q", [1, inf])
@pytest.mark.parametrize("n,k,a", [(2, 1, 0.3), (3, 1, 0.55), (4, 3, 0.2)])
def test_grid_halving_stability(q, n, k, a):
    f = kernel_g_deriv_n(n, k, a)
    full = best_approx(f, n - 1, q).value
    half = best_approx(f, n - 1, q, grid=1024).value
    assert abs(full - half) < 1e-7


@pytest.mark.parametrize("q", [1, 1.5, 3, inf])
@pytest.mark.parametrize("n,k", [(2, 0), (3, 1), (4, 2)])
def test_two_parametrizations(q, n, k):
    a = Fraction(2, 5)
    g = kernel_g_deriv_n(n, k, a)
    S = spline_S(n, k, a)
    via_g = best_approx(g, n - 1, q)
    via_S = best_approx(S, n - 1, q)
    assert via_S.value == pytest.approx(via_g.value, abs=1e-9)
    nu = nu_from_correction(n, 0.4, -1.0 * via_S.correction)
    Q = build_Q(ProblemSpec(n, k, 2, 0.4), nu)
    diff = Q - g.to_float()
    for m in range(n, n + 4):
        c = (2 * m + 1) * exact_integral(diff * legendre(m).to_float())
        assert abs(c) < 1e-9


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_l2_solver_matches_exact(n):
    for k in range(n):
        for i in range(1, 10):
            a = Fraction(i, 10)
            v = A_solution(ProblemSpec(n, k, 2, a)).value
            assert v == pytest.approx(sqrt(exact_A2(n, k, a)), rel=1e-12)


# -- extremal witness -----------------------------------------------------------

def test_witness_p2_is_g():
    spec = ProblemSpec(2, 0, 2, Fraction(1, 2))
    w = extremal_witness(spec)
    assert w.ratio == pytest.approx(sqrt(exact_A2(2, 0, Fraction(1, 2))), rel=1e-10)
    g = kernel_g_deriv_n(2, 0, Fraction(1, 2)).to_float()
    xs = np.linspace(0.01, 0.99, 7)
    assert np.allclose(w.yn(xs), g.evaluate(xs), atol=1e-12)


def test_witness_examples():
    spec = ProblemSpec(1, 0, 3, 0.5)
    assert extremal_witness(spec).ratio == pytest.approx(A_value(spec), rel=1e-7)
    spec = ProblemSpec(2, 1, 1.5, 0.3)
    w = extremal_witness(spec)
    scale = w.value ** (w.q - 1)
    assert np.max(np.abs(w.moments)) <= 1e-9 * scale
    assert w.ratio == pytest.approx(A_value(spec), rel=1e-7)


def test_witness_boundary_data():
    spec = ProblemSpec(3, 1, 3, 0.35)
    w = extremal_witness(spec)
    for j in range(3):
        assert abs(w.derivative(j, 1.0)) < 1e-9


def test_witness_domain_and_moment_errors():
    with pytest.raises(DomainError):
        extremal_witness(ProblemSpec(2, 1, inf, 0.3))
    spec = ProblemSpec(2, 0, 3, 0.3)
    sol = A_solution(spec)
    bad = type(sol)(sol.correction, sol.value, sol.residual + 0.05, sol.diagnostics,
                    sol.iterations, sol.method, sol.coeffs)
    with pytest.raises(MomentError):
        extremal_witness(spec, bad)
