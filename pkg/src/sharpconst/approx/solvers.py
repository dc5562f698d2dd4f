"""Best approximation of piecewise polynomials by polynomials of fixed degree.

``best_approx(f, degree, q)`` minimises ``||f - u||_{L_q[0,1]}`` over
polynomials u of degree <= ``degree``, for q in [1, inf]:

* ``1 < q < inf``: damped Newton iteration on ``int |f-u|^q``.  Each step
  is a reweighted least-squares solve with weight ``|f-u|^(q-2)``.  It
  starts from the L2 projection and stops on the first-order conditions
  ``int x^j |r|^(q-1) sgn r = 0``.
* ``q = 1`` and ``q = inf``: linear programs on a node grid with adaptive
  refinement, solved by the boxed dual simplex.  The value reported is
  always the norm of the continuous residual, never the discrete objective.

Unknowns are Legendre coefficients on [0, 1]; the monomial form is
produced only for the returned ``correction``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import inf

import numpy as np

from .. import _accel
from ..errors import DomainError, NonConvergenceError
from ..polycore import (
    PiecewisePolynomial,
    Polynomial,
    exact_integral,
    isolate_roots,
    legendre,
    legendre_values,
    local_extrema,
    lq_integral,
    lq_norm,
    power_moments,
    power_rule,
    sign_segments,
)
from .simplex import choose_basis, dual_simplex, max_iterations

GRID_POINTS = 2048
L1_TOL = 1e-8
LINF_TOL = 1e-10
SMOOTH_TOL = 1e-9
SMOOTH_MAX_ITER = 500


@dataclass
class ApproxSolution:
    """Result of a best-approximation solve.

    ``coeffs`` are the Legendre coordinates of ``correction``; ``value`` is
    ``||residual||_q`` with ``residual = f - correction``.
    """

    correction: Polynomial
    value: float
    residual: PiecewisePolynomial
    diagnostics: dict = field(default_factory=dict)
    iterations: int = 0
    method: str = ""
    coeffs: np.ndarray = None


@lru_cache(maxsize=None)
def _legendre_float(j: int) -> Polynomial:
    return legendre(j).to_float()


def from_legendre(coeffs) -> Polynomial:
    out = Polynomial([0.0])
    for j, cj in enumerate(coeffs):
        out = out + float(cj) * _legendre_float(j)
    return out


def _as_float_piecewise(f) -> PiecewisePolynomial:
    if isinstance(f, Polynomial):
        f = PiecewisePolynomial.from_polynomial(f)
    return f.to_float()


def legendre_projection(f, degree: int) -> np.ndarray:
    """Legendre coordinates of the L2 projection of f onto degree <= ``degree``."""
    if isinstance(f, Polynomial):
        f = PiecewisePolynomial.from_polynomial(f)
    out = []
    for j in range(degree + 1):
        Pj = legendre(j) if f.exact else _legendre_float(j)
        out.append(float((2 * j + 1) * exact_integral(f * Pj, 0, 1)))
    return np.array(out)


def residual_orthogonality(r, q, degree: int):
    """``[int_0^1 x^j |r|^(q-1) sgn r dx for j = 0..degree]``.

    Exact ``Fraction`` values for exact r and q = 2.
    """
    if not 1 < q < inf:
        raise DomainError(f"orthogonality defects need 1 < q < inf, got {q}")
    if isinstance(r, Polynomial):
        r = PiecewisePolynomial.from_polynomial(r)
    if q == 2:
        return [exact_integral(r * Polynomial.monomial(j), 0, 1) for j in range(degree + 1)]
    return power_moments(r.to_float(), float(q) - 1.0, degree)


def best_approx(f, degree: int, q, **kwargs) -> ApproxSolution:
    """Minimise ``||f - u||_q`` over polynomials u of degree <= ``degree``."""
    if degree < 0:
        raise DomainError("degree must be >= 0")
    if q == inf:
        return best_approx_linf(f, degree, **kwargs)
    if q < 1:
        raise DomainError(f"q = {q} < 1")
    if q == 1:
        return best_approx_l1(f, degree, **kwargs)
    return best_approx_smooth(f, degree, q, **kwargs)


# -- 1 < q < inf -------------------------------------------------------------

def _objective(f, coeffs, q) -> float:
    return float(lq_integral(f - from_legendre(coeffs), q))


def best_approx_smooth(f, degree: int, q, tol: float = SMOOTH_TOL,
                       max_iter: int | None = None, guess=None) -> ApproxSolution:
    """Best L_q approximation for 1 < q < inf.

    The objective ``Phi(c) = int |f - u_c|^q`` is strictly convex.  Each
    iteration solves ``H d = g`` with ``g_j = int P_j |r|^(q-1) sgn r`` and
    ``H_ij = (q-1) int P_i P_j |r|^(q-2)``, then halves the step until Phi
    decreases.
    """
    if not 1 < q < inf:
        raise DomainError(f"smooth solver needs 1 < q < inf, got {q}")
    q = float(q)
    f = _as_float_piecewise(f)
    max_iter = max_iterations(SMOOTH_MAX_ITER) if max_iter is None else max_iter
    c = legendre_projection(f, degree) if guess is None else np.asarray(guess, dtype=float)

    if q == 2.0:
        u = from_legendre(c)
        r = f - u
        defects = np.array([float(v) for v in residual_orthogonality(r, 2, degree)])
        return ApproxSolution(
            u, float(lq_norm(r, 2)), r,
            {"orthogonality_defects": defects}, 0, "l2-projection", c,
        )

    stop_tol = min(tol, 1e-12)
    phi_now = _objective(f, c, q)
    it = 0
    tiny_steps = 0
    for it in range(max_iter + 1):
        u = from_legendre(c)
        r = f - u
        segs = sign_segments(r)
        x1, w1, s1 = power_rule(r, q - 1.0, segments=segs)
        if len(x1) == 0:
            break
        defects = _accel.power_moments(s1, x1, w1, degree, 0.0, True)
        scale = phi_now ** ((q - 1.0) / q)
        if np.max(np.abs(defects)) <= stop_tol * scale or it == max_iter or tiny_steps >= 3:
            break
        V1 = legendre_values(degree, x1).T
        g = V1.T @ (w1 * s1)
        x2, w2, _ = power_rule(r, q - 2.0, segments=segs)
        V2 = legendre_values(degree, x2).T
        H = (q - 1.0) * (V2.T * w2) @ V2
        try:
            step = np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(H, g, rcond=None)[0]
        decrement = float(g @ step)
        if decrement <= 1e-13 * phi_now:
            # inside the quadratic regime the objective change is below
            # rounding, so the line search cannot judge the step
            c = c + step
            phi_now = _objective(f, c, q)
            tiny_steps += 1
            continue
        t = 1.0
        improved = False
        while t > 2.0 ** -40:
            trial = c + t * step
            val = _objective(f, trial, q)
            if val <= phi_now:
                c, phi_now = trial, val
                improved = True
                break
            t *= 0.5
        if not improved:
            break

    u = from_legendre(c)
    r = f - u
    defects = power_moments(r, q - 1.0, degree)
    value = float(lq_integral(r, q)) ** (1.0 / q)
    sol = ApproxSolution(
        u, value, r, {"orthogonality_defects": defects}, it, "newton-irls", c,
    )
    if np.max(np.abs(defects)) > tol * value ** (q - 1.0):
        raise NonConvergenceError(
            f"L_{q} solver stopped with defects {np.max(np.abs(defects)):.2e}",
            best=sol, iterations=it,
        )
    return sol


# -- grids for the LP solvers ------------------------------------------------

def _cheb_lobatto(lo: float, hi: float, npts: int) -> np.ndarray:
    i = np.arange(npts)
    return lo + (hi - lo) * 0.5 * (1.0 - np.cos(np.pi * i / (npts - 1)))


class _NodeSet:
    """Nodes tagged with the piece they belong to; new nodes are appended."""

    def __init__(self, f: PiecewisePolynomial, npts: int):
        self.f = f
        self.bounds = [(float(a), float(b)) for a, b in f.intervals()]
        xs, ps = [], []
        for i, (a, b) in enumerate(self.bounds):
            pts = _cheb_lobatto(a, b, max(npts, 2))
            xs.append(pts)
            ps.append(np.full(len(pts), i))
        self.x = np.concatenate(xs)
        self.piece = np.concatenate(ps)
        self._values()

    def _values(self):
        v = np.empty_like(self.x)
        for i, p in enumerate(self.f.pieces):
            mask = self.piece == i
            v[mask] = p.evaluate(self.x[mask])
        self.values = v

    def add(self, points, piece: int) -> int:
        a, b = self.bounds[piece]
        pts = np.unique(np.clip(np.asarray(points, dtype=float), a, b))
        existing = np.sort(self.x[self.piece == piece])
        i = np.clip(np.searchsorted(existing, pts), 1, len(existing) - 1)
        gap = np.minimum(np.abs(existing[i - 1] - pts), np.abs(existing[i] - pts))
        keep = pts[gap > 1e-15]
        if not len(keep):
            return 0
        self.x = np.concatenate([self.x, keep])
        self.piece = np.concatenate([self.piece, np.full(len(keep), piece)])
        self._values()
        return len(keep)

    def spacing_near(self, z: float, piece: int) -> float:
        xs = np.sort(self.x[self.piece == piece])
        i = np.searchsorted(xs, z)
        lo = xs[max(i - 1, 0)]
        hi = xs[min(i, len(xs) - 1)]
        return max(hi - lo, 1e-16)

    def trapezoid_weights(self) -> np.ndarray:
        w = np.zeros_like(self.x)
        for i in range(len(self.bounds)):
            idx = np.nonzero(self.piece == i)[0]
            order = idx[np.argsort(self.x[idx], kind="stable")]
            xs = self.x[order]
            h = np.diff(xs)
            wi = np.zeros(len(xs))
            wi[:-1] += 0.5 * h
            wi[1:] += 0.5 * h
            w[order] = wi
        return w


def _initial_order(values, V, coeffs):
    r0 = values - V @ coeffs
    return np.argsort(np.abs(r0), kind="stable"), r0


# -- q = 1 ---------------------------------------------------------------------

def best_approx_l1(f, degree: int, tol: float = L1_TOL, grid: int = GRID_POINTS,
                   max_rounds: int = 12, guess=None) -> ApproxSolution:
    """Best L1 approximation via the discretised dual LP.

    The LP is ``max sum w_i f_i s_i`` over ``|s_i| <= 1`` subject to
    ``sum w_i s_i P_j(x_i) = 0``.  Its row multipliers are the Legendre
    coordinates of the discrete best approximation.  After each solve, nodes
    are clustered around the sign changes of the continuous residual and
    the LP is re-solved from the previous basis.  This repeats until the
    continuous L1 norm changes by less than ``tol``.
    """
    f = _as_float_piecewise(f)
    m = degree + 1
    nodes = _NodeSet(f, grid)
    coeffs = legendre_projection(f, degree) if guess is None else np.asarray(guess, float)
    V = legendre_values(degree, nodes.x).T
    order, r0 = _initial_order(nodes.values, V, coeffs)
    w = nodes.trapezoid_weights()
    basis = choose_basis((w[:, None] * V).T, order)
    at_hi = r0 > 0

    best = None
    prev = None
    total_iters = 0
    for rnd in range(max_rounds):
        V = legendre_values(degree, nodes.x).T
        w = nodes.trapezoid_weights()
        A = (w[:, None] * V).T
        n_nodes = len(nodes.x)
        if len(at_hi) < n_nodes:
            rr = nodes.values[len(at_hi):] - V[len(at_hi):] @ coeffs
            at_hi = np.concatenate([at_hi, rr > 0])
        res = dual_simplex(w * nodes.values, A, np.zeros(m), -np.ones(n_nodes),
                           np.ones(n_nodes), basis, at_hi=at_hi)
        total_iters += res.iterations
        basis = res.basis
        at_hi = res.x > 0
        coeffs = res.y
        u = from_legendre(coeffs)
        r = f - u
        value = float(lq_integral(r, 1))
        if best is None or value < best[0]:
            best = (value, coeffs.copy(), u, r)
        if prev is not None and abs(prev - value) < tol:
            break
        prev = value
        added = 0
        for root in isolate_roots(r):
            if root.kind != "root":
                continue
            z = float(root.point)
            piece = r.piece_index(z)
            h = nodes.spacing_near(z, piece)
            added += nodes.add(z + h * np.linspace(-1.0, 1.0, 17), piece)
            if piece > 0 and z == nodes.bounds[piece][0]:
                added += nodes.add(z + h * np.linspace(0.0, 1.0, 9), piece - 1)
        if added == 0:
            break

    value, coeffs, u, r = best
    crossings = [rt for rt in isolate_roots(r) if rt.sign_change]
    diag = {
        "sign_changes": [float(rt.point) for rt in crossings],
        "sign_change_kinds": [rt.kind for rt in crossings],
        "nodes": int(len(nodes.x)),
        "rounds": rnd + 1,
        "dual_moments": _dual_moment_check(nodes, res.x, degree),
    }
    return ApproxSolution(u, value, r, diag, total_iters, "lp-l1", coeffs)


def _dual_moment_check(nodes, s, degree):
    w = nodes.trapezoid_weights()
    V = legendre_values(degree, nodes.x).T
    return V.T @ (w * s)


# -- q = inf -------------------------------------------------------------------

def _linf_matrix(V: np.ndarray, values: np.ndarray):
    N, m = V.shape
    top = np.hstack([V.T, -V.T, np.zeros((m, 1))])
    bottom = np.concatenate([np.ones(2 * N), [1.0]])[None, :]
    A = np.vstack([top, bottom])
    c = np.concatenate([values, -values, [0.0]])
    b = np.zeros(m + 1)
    b[-1] = 1.0
    return A, c, b


def _remap_linf_basis(basis, n_old, n_new):
    out = []
    for j in basis:
        if j < n_old:
            out.append(j)
        elif j < 2 * n_old:
            out.append(j - n_old + n_new)
        else:
            out.append(2 * n_new)
    return out


def _knot_active(f: PiecewisePolynomial, u: Polynomial, level: float, tol: float):
    """Interior knots where a one-sided limit of f - u reaches ``level``."""
    out = []
    for t in f.knots[1:-1]:
        left, right, _ = f.limits(t)
        ut = u(float(t))
        if max(abs(left - ut), abs(right - ut)) >= level - tol:
            out.append(float(t))
    return out


def _central_solve(nodes, V, level, knots, basis_hint):
    """Among solutions with sup over nodes <= level, maximise the margin s.

    The constraints are ``|f_i - u(x_i)| + s w_i <= level`` with
    ``w_i = min(dist(x_i, knots), 1)``.  When the jump pins the level at the
    knot, the optimal set has interior.  A plain vertex then touches the
    band all over the grid and overshoots between nodes, while the
    margin-maximising point keeps clear of it away from the knot.  This is
    solved through the dual, like the first stage.
    """
    x, F = nodes.x, nodes.values
    N, m = V.shape
    w = np.min(np.abs(x[:, None] - np.asarray(knots)[None, :]), axis=1)
    w = np.minimum(w, 1.0)
    top = np.hstack([V.T, -V.T])
    A = np.vstack([top, np.concatenate([w, w])[None, :]])
    c = np.concatenate([F - level, -F - level])
    b = np.zeros(m + 1)
    b[-1] = 1.0
    cap = np.where(w > 0, 1.0 / np.maximum(w, 1e-300), 1e6)
    cap = np.minimum(cap, 1e6)
    hi = np.concatenate([cap, cap])
    order = [j for j in basis_hint if j < 2 * N] + list(np.argsort(-np.abs(c), kind="stable"))
    basis = choose_basis(A, order)
    res = dual_simplex(c, A, b, np.zeros(2 * N), hi, basis)
    # row multipliers: (u, -s)
    return res.y[:m], -float(res.y[m]), res.iterations


def best_approx_linf(f, degree: int, tol: float = LINF_TOL, grid: int = GRID_POINTS,
                     max_rounds: int = 40, guess=None) -> ApproxSolution:
    """Best uniform approximation via the discretised Chebyshev LP.

    Knot limits from both sides are always nodes.  Each round adds the
    interior critical points of the continuous residual to the node set.
    It stops once the continuous sup-norm exceeds the discrete minimax level
    by less than ``tol``, or changes by less than ``tol`` between rounds.
    When the level is pinned by a jump, the minimiser is not unique.  A
    second LP then picks the optimum with the largest margin away from the
    knot (see :func:`_central_solve`).
    """
    f = _as_float_piecewise(f)
    m = degree + 1
    nodes = _NodeSet(f, grid)
    coeffs = legendre_projection(f, degree) if guess is None else np.asarray(guess, float)
    V = legendre_values(degree, nodes.x).T
    N = len(nodes.x)
    r0 = nodes.values - V @ coeffs
    # reference: m+1 nodes spread over the grid, signed by the initial residual
    ref = np.unique(np.linspace(0, N - 1, m + 1).round().astype(int))
    pref = [int(i) if r0[i] >= 0 else int(i + N) for i in ref]
    A, c, b = _linf_matrix(V, nodes.values)
    rest = np.argsort(-np.abs(r0), kind="stable")
    order = pref + [int(i) if r0[i] >= 0 else int(i + N) for i in rest] + [2 * N]
    basis = choose_basis(A, order)

    best = None
    prev = None
    total_iters = 0
    central = False
    for rnd in range(max_rounds):
        V = legendre_values(degree, nodes.x).T
        A, c, b = _linf_matrix(V, nodes.values)
        n_cols = A.shape[1]
        res = dual_simplex(c, A, b, np.zeros(n_cols), np.ones(n_cols), basis)
        total_iters += res.iterations
        coeffs = res.y[:m]
        level = float(res.y[m])
        u = from_legendre(coeffs)
        r = f - u
        value = float(lq_norm(r, inf))
        if value - level >= tol:
            knots = _knot_active(f, u, level, 1e-12 * max(1.0, level))
            if knots:
                c2, margin, it2 = _central_solve(
                    nodes, V, level + 1e-11 * max(1.0, level), knots, res.basis
                )
                total_iters += it2
                u2 = from_legendre(c2)
                r2 = f - u2
                v2 = float(lq_norm(r2, inf))
                if margin > 0 and v2 < value:
                    coeffs, u, r, value, central = c2, u2, r2, v2, True
        if best is None or value < best[0]:
            best = (value, np.array(coeffs, dtype=float), u, r, level)
        if value - level < tol or (prev is not None and abs(prev - value) < tol * 1e-2):
            break
        prev = value
        n_old = len(nodes.x)
        added = 0
        for x, v in local_extrema(r):
            if abs(v) >= level:
                piece = min(r.piece_index(x), len(r.pieces) - 1)
                added += nodes.add([x], piece)
        if added == 0:
            break
        basis = _remap_linf_basis(res.basis, n_old, len(nodes.x))

    value, coeffs, u, r, level = best
    ext = local_extrema(r)
    active = [(float(x), float(v)) for x, v in ext if abs(v) >= value - max(1e-9, 1e-7 * value)]
    diag = {
        "active_points": active,
        "discrete_level": level,
        "nodes": int(len(nodes.x)),
        "rounds": rnd + 1,
        "central": central,
    }
    return ApproxSolution(u, value, r, diag, total_iters, "lp-linf", coeffs)
