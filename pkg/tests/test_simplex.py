"""Dual simplex against HiGHS (scipy.optimize.linprog) on the same LPs."""

import numpy as np
import pytest
from scipy.optimize import linprog

from sharpconst.approx.simplex import (
    InfeasibleError,
    choose_basis,
    dual_simplex,
    max_iterations,
)
from sharpconst.errors import NonConvergenceError
from sharpconst.polycore import legendre_values


def highs_max(c, A, b, lo, hi):
    res = linprog(-c, A_eq=A, b_eq=b, bounds=list(zip(lo, hi)), method="highs")
    assert res.status == 0
    return -res.fun


def random_feasible_lp(rng, m, N):
    A = rng.standard_normal((m, N))
    x0 = rng.uniform(-1, 1, N)
    b = A @ x0
    c = rng.standard_normal(N)
    return c, A, b, -np.ones(N), np.ones(N)


@pytest.mark.parametrize("seed", range(12))
def test_random_box_lp_matches_highs(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, 7))
    N = int(rng.integers(m + 2, 300))
    c, A, b, lo, hi = random_feasible_lp(rng, m, N)
    basis = choose_basis(A, rng.permutation(N))
    res = dual_simplex(c, A, b, lo, hi, basis)
    assert res.objective == pytest.approx(highs_max(c, A, b, lo, hi), rel=1e-9, abs=1e-9)
    assert np.allclose(A @ res.x, b, atol=1e-8)
    assert np.all(res.x >= lo - 1e-9) and np.all(res.x <= hi + 1e-9)
    # duality: c - A^T y has the sign of the bound each x sits at
    d = c - A.T @ res.y
    assert np.all(d[res.x <= lo + 1e-9] <= 1e-8)
    assert np.all(d[res.x >= hi - 1e-9] >= -1e-8)


def test_discrete_l1_dual_matches_highs_primal():
    """``max sum w f s`` s.t. ``sum w s P_j = 0`` is the dual of discrete L1 fitting."""
    x = np.linspace(0, 1, 401)
    f = np.where(x < 0.3, 0.7, -0.3) + 0.2 * x ** 3
    w = np.full_like(x, x[1] - x[0])
    w[[0, -1]] *= 0.5
    V = legendre_values(2, x).T
    A = (w[:, None] * V).T
    N = len(x)
    res = dual_simplex(w * f, A, np.zeros(3), -np.ones(N), np.ones(N), choose_basis(A, range(N)))
    # primal: min sum w t, t >= +-(f - V u), variables (u, t)
    cp = np.concatenate([np.zeros(3), w])
    I = np.eye(N)
    A_ub = np.block([[-V, -I], [V, -I]])
    b_ub = np.concatenate([-f, f])
    pr = linprog(cp, A_ub=A_ub, b_ub=b_ub, bounds=[(None, None)] * 3 + [(0, None)] * N, method="highs")
    assert res.objective == pytest.approx(pr.fun, rel=1e-10)
    assert np.sum(w * np.abs(f - V @ res.y)) == pytest.approx(pr.fun, rel=1e-9)


def test_degenerate_lp_terminates():
    # many identical columns: a classic source of stalling
    rng = np.random.default_rng(1)
    base = rng.standard_normal((3, 5))
    A = np.hstack([base] * 60)
    N = A.shape[1]
    c = np.tile(rng.standard_normal(5), 60)
    b = np.zeros(3)
    res = dual_simplex(c, A, b, -np.ones(N), np.ones(N), choose_basis(A, range(N)))
    assert res.objective == pytest.approx(highs_max(c, A, b, -np.ones(N), np.ones(N)), rel=1e-9)


def test_infeasible_detected():
    A = np.array([[1.0, 1.0]])
    with pytest.raises(InfeasibleError):
        dual_simplex(np.zeros(2), A, np.array([5.0]), -np.ones(2), np.ones(2), [0])


def test_iteration_cap_from_environment(monkeypatch):
    monkeypatch.setenv("SHARPCONST_MAX_ITERS", "1")
    assert max_iterations() == 1
    rng = np.random.default_rng(4)
    c, A, b, lo, hi = random_feasible_lp(rng, 6, 200)
    with pytest.raises(NonConvergenceError) as exc:
        dual_simplex(c, A, b, lo, hi, choose_basis(A, range(200)))
    assert exc.value.best is not None


def test_choose_basis_rank_deficient():
    A = np.array([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0]])
    with pytest.raises(np.linalg.LinAlgError):
        choose_basis(A, range(3))
