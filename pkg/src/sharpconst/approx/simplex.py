"""Dense dual simplex for box-constrained linear programs.

Solves::

    maximize  c @ x   subject to  A @ x = b,  lo <= x <= hi

with finite bounds and few rows (m of order 10) but many columns.  With
finite bounds every basis is dual feasible once each nonbasic variable sits
at the bound matching the sign of its reduced cost.  So the dual simplex
can start from any nonsingular basis and needs no phase 1.  The ratio test
flips bounds in bulk (the "long step" rule), so a cold start costs few
pivots even with thousands of columns.

Everything is recomputed from the basis matrix each iteration.  The basis
is tiny, and recomputing avoids drift in an updated inverse.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from ..errors import NonConvergenceError

DEFAULT_MAX_ITER = 5000


def max_iterations(default: int = DEFAULT_MAX_ITER) -> int:
    env = os.environ.get("SHARPCONST_MAX_ITERS")
    return int(env) if env else default


@dataclass
class LPResult:
    x: np.ndarray
    y: np.ndarray
    basis: list
    objective: float
    iterations: int


class InfeasibleError(RuntimeError):
    """The box-constrained LP has no feasible point."""


def choose_basis(A: np.ndarray, order, rtol: float = 1e-3) -> list:
    """Greedy pick of m independent columns, trying ``order`` first.

    Columns are accepted if they add a direction whose norm after
    orthogonalisation exceeds ``rtol`` times their own norm.  Remaining slots
    are filled from all columns by largest residual norm.
    """
    m = A.shape[0]
    Qb = np.zeros((m, 0))
    chosen = []
    seen = set()

    def try_add(j):
        nonlocal Qb
        v = A[:, j].astype(float)
        nv = np.linalg.norm(v)
        if nv == 0.0:
            return False
        v = v - Qb @ (Qb.T @ v)
        v = v - Qb @ (Qb.T @ v)
        nr = np.linalg.norm(v)
        if nr <= rtol * nv:
            return False
        Qb = np.column_stack([Qb, v / nr])
        chosen.append(int(j))
        return True

    for j in order:
        if len(chosen) == m:
            break
        if j in seen:
            continue
        seen.add(j)
        try_add(j)
    if len(chosen) < m:
        for _ in range(m - len(chosen)):
            R = A - Qb @ (Qb.T @ A)
            norms = np.linalg.norm(R, axis=0)
            norms[chosen] = -1.0
            j = int(np.argmax(norms))
            if norms[j] <= 0 or not try_add(j):
                raise np.linalg.LinAlgError("constraint matrix is rank deficient")
    return chosen


def dual_simplex(c, A, b, lo, hi, basis, at_hi=None, max_iter: int | None = None,
                 feas_tol: float = 1e-10, dual_tol: float = 1e-13) -> LPResult:
    """Maximise ``c @ x`` over ``{A x = b, lo <= x <= hi}`` from a starting basis.

    Parameters
    ----------
    basis : sequence of int
        m column indices forming a nonsingular basis matrix.
    at_hi : bool array, optional
        Initial bound choice for nonbasic variables with zero reduced cost.

    Raises
    ------
    InfeasibleError
        If the dual ratio test finds no entering column.
    NonConvergenceError
        After ``max_iter`` pivots; ``best`` carries the last basis.
    """
    c = np.asarray(c, dtype=float)
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    m, N = A.shape
    B = list(basis)
    if len(B) != m:
        raise ValueError(f"basis has {len(B)} columns, need {m}")
    at_hi = np.zeros(N, dtype=bool) if at_hi is None else np.asarray(at_hi, dtype=bool).copy()
    max_iter = max_iterations() if max_iter is None else max_iter

    cscale = max(1.0, float(np.max(np.abs(c)))) if N else 1.0
    ascale = max(1.0, float(np.max(np.abs(A)))) if N else 1.0
    span = hi - lo
    # anti-cycling: on a long stall, solve with slightly perturbed costs,
    # then restore the true costs and finish from that basis
    cw = c
    rng = np.random.default_rng(0)
    best_obj = np.inf
    stall = 0
    perturbed = False
    restarts = 0

    for it in range(max_iter + 1):
        AB = A[:, B]
        y = np.linalg.solve(AB.T, cw[B])
        d = cw - A.T @ y
        d[B] = 0.0
        tol_d = dual_tol * cscale
        at_hi = np.where(d > tol_d, True, np.where(d < -tol_d, False, at_hi))
        x = np.where(at_hi, hi, lo)
        x[B] = 0.0
        Ax = A @ x
        xB = np.linalg.solve(AB, b - Ax)
        x[B] = xB

        lb, ub = lo[B], hi[B]
        # large nonbasic values cost accuracy in the rhs; widen the tolerance to match
        rhs_scale = max(1.0, float(np.max(np.abs(Ax))) if m else 1.0)
        scale = feas_tol * (1.0 + np.abs(xB)) * ascale * rhs_scale
        below = lb - xB
        above = xB - ub
        viol = np.maximum(below, above)
        r = int(np.argmax(viol - scale))
        if viol[r] <= scale[r]:
            if not perturbed:
                y = np.linalg.solve(AB.T, c[B])
                return LPResult(x, y, B, float(c @ x), it)
            cw = c
            perturbed = False
            best_obj = np.inf
            stall = 0
            continue
        if it == max_iter:
            break

        obj = float(cw @ x)
        if obj < best_obj - 1e-14 * max(1.0, abs(obj)):
            best_obj = obj
            stall = 0
        else:
            stall += 1
        if stall >= 50 and restarts < 5:
            # a stall under perturbed costs escalates to a larger perturbation
            restarts += 1
            delta = 1e-9 * cscale * 10.0 ** restarts
            cw = c + delta * rng.uniform(0.5, 1.0, N) * np.where(at_hi, 1.0, -1.0)
            perturbed = True
            best_obj = np.inf
            stall = 0
            continue

        leaving_below = below[r] >= above[r]
        delta = viol[r]
        rho = np.linalg.solve(AB.T, np.eye(m)[r])
        alpha = A.T @ rho
        sgn = 1.0 if leaving_below else -1.0
        at = sgn * alpha
        nonbasic = np.ones(N, dtype=bool)
        nonbasic[B] = False
        atol = 1e-12 * ascale
        cand = nonbasic & (((~at_hi) & (at < -atol)) | (at_hi & (at > atol)))
        idx = np.nonzero(cand)[0]
        if len(idx) == 0:
            raise InfeasibleError("dual ratio test found no entering column")
        ratios = np.maximum(d[idx] / at[idx], 0.0)
        order = np.lexsort((idx, ratios))
        idx, ratios = idx[order], ratios[order]
        # long step: pass breakpoints while the dual slope stays non-negative
        drops = np.abs(alpha[idx]) * span[idx]
        slope = delta - np.cumsum(drops)
        k = int(np.searchsorted(-slope, 0.0, side="right"))
        k = min(k, len(idx) - 1)
        q = int(idx[k])
        flips = idx[:k]
        at_hi[flips] = ~at_hi[flips]
        leaving = B[r]
        at_hi[leaving] = not leaving_below
        B[r] = q

    raise NonConvergenceError(
        f"dual simplex hit the iteration cap ({max_iter})",
        best=LPResult(x, y, list(B), float(c @ x), max_iter),
        iterations=max_iter,
    )
