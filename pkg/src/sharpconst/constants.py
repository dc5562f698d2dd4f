"""Pointwise constants A_{n,k,p}(a), their profiles in a, and Lambda = sup_a A.

``A_value`` is a best-approximation problem.  The L_{p'} distance from
``g^(n)`` (the n-th derivative of the representer) to polynomials of
degree < n is computed with :mod:`sharpconst.approx`.  For p = 2 the
distance is ``||g^(n)||_2`` itself, because ``g^(n)`` is already orthogonal
to P_{n-1}.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import factorial, inf
from typing import NamedTuple, Optional

import numpy as np

from .approx.solvers import ApproxSolution, best_approx
from .errors import DomainError, MomentError, NonConvergenceError
from .kernels import (
    ProblemSpec,
    conjugate_exponent,
    kernel_g_deriv_n,
    legendre_coeffs_of_g,
)
from .polycore import (
    PiecewisePolynomial,
    Polynomial,
    exact_integral,
    lq_integral,
    power_moments,
    power_rule,
    sign_segments,
)
from .polycore.polynomial import is_exact_scalar

DEFAULT_GRID = 1001
GOLDEN_TOL = 1e-8
CLOSED_FORM_TOL = 1e-6
WITNESS_MOMENT_TOL = 1e-9
PEAK_RTOL = 1e-9
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class ProfileRow:
    a: float
    A: float
    envelope: Optional[float] = None
    error: Optional[str] = None


class ClosedForm(NamedTuple):
    value: float
    bound: bool  # True when only an upper bound is known


@dataclass
class LambdaResult:
    n: int
    k: int
    p: object
    value: float
    argmax_a: float
    method: str
    closed_form_available: bool
    closed_form: Optional[float] = None
    optimized: Optional[float] = None
    agrees: Optional[bool] = None
    upper_bound: Optional[float] = None
    maxima: list = field(default_factory=list)
    rows: list = field(default_factory=list, repr=False)  # sampled profile

    @property
    def flagged(self) -> bool:
        """Closed form and optimisation disagree, or the bound is violated."""
        if self.agrees is False:
            return True
        if self.upper_bound is not None and self.optimized is not None:
            return self.optimized > self.upper_bound + CLOSED_FORM_TOL
        return False

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("rows")
        d["lambda"] = d.pop("value")
        d["p"] = format_p(self.p)
        d["flagged"] = self.flagged
        d["maxima"] = [list(m) for m in self.maxima]
        return d


def format_p(p) -> str:
    if p == inf:
        return "inf"
    if isinstance(p, Fraction) and p.denominator == 1:
        return str(p.numerator)
    if isinstance(p, float) and p.is_integer():
        return str(int(p))
    return str(float(p)) if not isinstance(p, int) else str(p)


# -- A(a) ------------------------------------------------------------------------

def _float_kernel(n: int, k: int, a) -> PiecewisePolynomial:
    if is_exact_scalar(a):
        return kernel_g_deriv_n(n, k, Fraction(a)).to_float()
    return kernel_g_deriv_n(n, k, float(a))


def exact_A2(n: int, k: int, a) -> Fraction:
    """Exact ``int_0^1 (g^(n))^2`` for rational a."""
    if not is_exact_scalar(a):
        raise DomainError("exact_A2 needs a rational a (int or Fraction)")
    gn = kernel_g_deriv_n(n, k, Fraction(a))
    return exact_integral(gn * gn, 0, 1)


def series_A2(n: int, k: int, a, M: int):
    """Partial sum ``sum_{m=n}^{M} (2m+1) (P_m^(k-n)(a))^2`` of the Legendre expansion of A^2."""
    if M < n:
        raise DomainError(f"M = {M} must be >= n = {n}")
    alphas = legendre_coeffs_of_g(n, k, a, M)
    m = np.arange(n, M + 1)
    if isinstance(alphas[0], Fraction):
        return sum(al * al / (2 * mm + 1) for al, mm in zip(alphas, range(n, M + 1)))
    al = np.asarray(alphas, dtype=float)
    return float(np.sum(al * al / (2 * m + 1)))


def A_solution(spec: ProblemSpec, **solver_kwargs) -> ApproxSolution:
    """Best approximation of ``g^(n)`` in L_{p'}; its value is A_{n,k,p}(a)."""
    f = _float_kernel(spec.n, spec.k, spec.a)
    return best_approx(f, spec.n - 1, spec.q, **solver_kwargs)


def A_value(spec: ProblemSpec, **solver_kwargs) -> float:
    """A_{n,k,p}(a).

    Examples
    --------
    >>> round(A_value(ProblemSpec(1, 0, 2, Fraction(1, 4))), 7)
    0.4330127
    """
    if spec.p == 2:
        return math.sqrt(exact_A2(spec.n, spec.k, Fraction(spec.a)))
    return float(A_solution(spec, **solver_kwargs).value)


def envelope_B(n: int, a) -> float:
    if not 0 <= a <= 1:
        raise DomainError(f"a = {a} outside [0, 1]")
    return math.tan(math.pi / (2 * (n + 1))) * math.sqrt(max(float(a) - float(a) ** 2, 0.0))


def local_max_points(n: int) -> list:
    """``sin^2(pi j / (2(n+1)))`` for j = 1..n."""
    if n < 1:
        raise DomainError("n must be >= 1")
    return [math.sin(math.pi * j / (2 * (n + 1))) ** 2 for j in range(1, n + 1)]


def closed_form_lambda(n: int, k: int, p) -> Optional[ClosedForm]:
    """Known value of sup_a A_{n,k,p}(a), if any.

    p = inf, k = n-1 and p = 1, k = n-1 are exact.  For p = 1, k < n-1 only
    the upper bound ``1 / (2 (n-k-1)!)`` is known, marked ``bound=True``.
    """
    if n < 1 or not 0 <= k <= n - 1:
        raise DomainError(f"invalid (n, k) = ({n}, {k})")
    if p == inf and k == n - 1:
        t = 0.5 * math.tan(math.pi / (2 * (n + 1)))
        if n % 2 == 0:
            t *= math.sin(math.pi * n / (2 * (n + 1)))
        return ClosedForm(t, False)
    if p == 1:
        if k == n - 1:
            return ClosedForm(0.5, False)
        return ClosedForm(1.0 / (2 * factorial(n - k - 1)), True)
    return None


# -- profiles -----------------------------------------------------------------------

def grid_points(grid: int) -> list:
    """``a_i = i / (grid + 1)``, i = 1..grid, as exact fractions."""
    if grid < 3:
        raise DomainError("grid must be >= 3")
    return [Fraction(i, grid + 1) for i in range(1, grid + 1)]


class _Evaluator:
    """Evaluates A(a) for fixed (n, k, p), warm-starting from the last solve.

    Neighbouring values of a have nearby optimal corrections, so the last
    Legendre coefficients make a good starting point.  The result does not
    depend on the start beyond solver tolerance.
    """

    def __init__(self, n, k, p, solver_kwargs=None):
        self.n, self.k, self.p = n, k, p
        self.kwargs = dict(solver_kwargs or {})
        self.guess = None

    def __call__(self, a) -> float:
        spec = ProblemSpec(self.n, self.k, self.p, a if self.p == 2 else float(a))
        if self.p == 2:
            return A_value(spec)
        kw = dict(self.kwargs)
        if self.guess is not None and "guess" not in kw:
            kw["guess"] = self.guess
        try:
            sol = A_solution(spec, **kw)
        except NonConvergenceError:
            if "guess" not in kw or "guess" in self.kwargs:
                raise
            # the warm start only picks the initial basis; retry from scratch
            del kw["guess"]
            sol = A_solution(spec, **kw)
        self.guess = sol.coeffs
        return float(sol.value)

    def row(self, a) -> ProfileRow:
        n, k, p = self.n, self.k, self.p
        env = envelope_B(n, a) if (p == inf and k == n - 1) else None
        try:
            return ProfileRow(float(a), self(a), env)
        except (NonConvergenceError, ArithmeticError, np.linalg.LinAlgError, RuntimeError) as exc:
            self.guess = None
            return ProfileRow(float(a), float("nan"), env, f"{type(exc).__name__}: {exc}")


def _rows_chunk(args):
    n, k, p, pts, kwargs = args
    ev = _Evaluator(n, k, p, kwargs)
    return [ev.row(a) for a in pts]


def A_profile(n: int, k: int, p, grid: int = DEFAULT_GRID, points=None, jobs: int = 1,
              **solver_kwargs) -> list:
    """Rows ``(a, A(a), B_n(a) or None)`` over a uniform interior grid, sorted by a.

    A row whose solve fails carries NaN and an ``error`` message instead of
    raising.  ``jobs > 1`` evaluates rows in a process pool; order is by a.
    """
    ProblemSpec(n, k, p, Fraction(1, 2))  # validate (n, k, p) up front
    pts = grid_points(grid) if points is None else list(points)
    for a in pts:
        if not 0 < a < 1:
            raise DomainError(f"profile point a = {a} outside (0, 1)")
    pts = sorted(pts)
    if jobs and jobs > 1:
        size = max(1, -(-len(pts) // (4 * jobs)))
        chunks = [(n, k, p, pts[i:i + size], solver_kwargs) for i in range(0, len(pts), size)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return [row for part in pool.map(_rows_chunk, chunks) for row in part]
    return _rows_chunk((n, k, p, pts, solver_kwargs))


def sampled_local_maxima(rows, rtol: float = 0.0) -> list:
    """Indices i with ``A[i-1] <= A[i] >= A[i+1]`` (ends compare one side).

    Values within ``rtol * max(1, |A|)`` of the first value of a run count
    as equal, so solver noise on a flat stretch does not create peaks.  A
    run counts once, at its largest sample.
    """
    A = [r.A for r in rows]
    out = []
    i = 0
    N = len(A)
    while i < N:
        if math.isnan(A[i]):
            i += 1
            continue
        eps = rtol * max(1.0, abs(A[i]))
        j = i
        while j + 1 < N and abs(A[j + 1] - A[i]) <= eps:
            j += 1
        top = max(range(i, j + 1), key=lambda t: A[t])
        left_ok = i == 0 or A[i - 1] < A[i] - eps
        right_ok = j == N - 1 or A[j + 1] < A[i] - eps
        if left_ok and right_ok:
            out.append(top)
        i = j + 1
    return out


def _golden_max(func, lo: float, hi: float, tol: float = GOLDEN_TOL):
    """Maximise a unimodal function on [lo, hi] by golden-section search."""
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = func(c), func(d)
    best = max((fc, c), (fd, d))
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = func(c)
            best = max(best, (fc, c))
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = func(d)
            best = max(best, (fd, d))
    return best[1], best[0]


def _mirrored_profile(n, k, p, grid, jobs, solver_kwargs) -> list:
    """Profile on the grid, solving only for a <= 1/2.

    Reflecting x -> 1-x maps admissible y to admissible y with
    ``|y^(k)(a)|`` moved to ``1-a`` and the same norm, so A is symmetric.
    The grid ``i/(grid+1)`` is symmetric too, which makes the mirror exact.
    """
    pts = grid_points(grid)
    half = pts[: (grid + 1) // 2]
    left = A_profile(n, k, p, points=half, jobs=jobs, **solver_kwargs)
    rows = list(left)
    for i in range(len(half), grid):
        src = left[grid - 1 - i]
        a = pts[i]
        env = envelope_B(n, a) if src.envelope is not None else None
        rows.append(ProfileRow(float(a), src.A, env, src.error))
    return rows


def lambda_constant(n: int, k: int, p, grid: int = DEFAULT_GRID, jobs: int = 1,
                    max_refine: Optional[int] = None, **solver_kwargs) -> LambdaResult:
    """sup_a A_{n,k,p}(a) by grid sampling and golden-section refinement.

    Every sampled local maximum is refined (up to ``max_refine``, default
    4n, taken in order of sampled value), and the best refined value wins.
    When a closed form is known, both values are reported and must agree
    to 1e-6; ``agrees=False`` marks the result as flagged.
    """
    rows = _mirrored_profile(n, k, p, grid, jobs, solver_kwargs)
    # A(a) = A(1-a), so refining the left half (and the centre) is enough
    peaks = [i for i in sampled_local_maxima(rows, PEAK_RTOL) if 2 * (i + 1) <= grid + 1]
    peaks.sort(key=lambda i: -rows[i].A)
    peaks = peaks[: (4 * n if max_refine is None else max_refine)]
    a_grid = [r.a for r in rows]
    h = 1.0 / (grid + 1)

    ev = _Evaluator(n, k, p, solver_kwargs)

    def A_at(a):
        return ev(Fraction(a) if p == 2 else a)

    i_best = max(range(len(rows)), key=lambda i: (rows[i].A if not math.isnan(rows[i].A) else -inf))
    best_a, best_v = a_grid[i_best], rows[i_best].A
    maxima = []
    for i in peaks:
        lo = a_grid[i - 1] if i > 0 else max(a_grid[i] - h, h / 2)
        hi = a_grid[i + 1] if i + 1 < len(rows) else min(a_grid[i] + h, 1 - h / 2)
        a_star, v_star = _golden_max(A_at, lo, hi)
        if rows[i].A > v_star:
            a_star, v_star = a_grid[i], rows[i].A
        maxima.append((a_star, v_star))
        if 2 * (i + 1) < grid + 1:
            maxima.append((1.0 - a_star, v_star))
        if v_star > best_v:
            best_a, best_v = a_star, v_star
    maxima.sort()

    cf = closed_form_lambda(n, k, p)
    res = LambdaResult(
        n=n, k=k, p=p, value=best_v, argmax_a=best_a, method="optimized",
        closed_form_available=cf is not None and not cf.bound,
        optimized=best_v, maxima=maxima, rows=rows,
    )
    if cf is not None and cf.bound:
        res.upper_bound = cf.value
    elif cf is not None:
        res.closed_form = cf.value
        res.agrees = abs(cf.value - best_v) <= CLOSED_FORM_TOL
        res.method = "closed-form"
        res.value = cf.value if res.agrees else best_v
    return res


# -- extremal functions ----------------------------------------------------------------

@dataclass
class ExtremalWitness:
    """Test function with ``y^(n) = |r|^(q-1) sgn r`` for the optimal residual r.

    ``ratio = y^(k)(a) / ||y^(n)||_p`` equals A_{n,k,p}(a).
    """

    spec: ProblemSpec
    residual: PiecewisePolynomial
    q: float
    moments: np.ndarray
    yk: float
    norm_p: float
    ratio: float
    value: float

    def yn(self, x):
        """``y^(n)(x)``."""
        r = np.asarray(self.residual.evaluate(np.atleast_1d(np.asarray(x, dtype=float))))
        return np.abs(r) ** (self.q - 1.0) * np.sign(r)

    def derivative(self, j: int, x: float) -> float:
        """``y^(j)(x) = int_0^x y^(n)(t) (x-t)^(n-j-1) / (n-j-1)! dt`` for j < n."""
        n = self.spec.n
        if not 0 <= j < n:
            raise DomainError(f"derivative order {j} outside 0..{n - 1}")
        if x <= 0:
            return 0.0
        r = self.residual
        if 0 < x < 1 and x not in r.knots:
            r = r.refine([x])
        t, w, s = power_rule(r, self.q - 1.0)
        e = n - j - 1
        mask = t < x
        return float(np.sum(w[mask] * s[mask] * (x - t[mask]) ** e) / factorial(e))


def extremal_witness(spec: ProblemSpec, solution: ApproxSolution | None = None,
                     tol: float = WITNESS_MOMENT_TOL) -> ExtremalWitness:
    """Extremal function of the sharp inequality for 1 < p < inf.

    Raises
    ------
    DomainError
        For p in {1, inf}, where ``|r|^(q-1) sgn r`` is not a witness.
    MomentError
        If ``y^(n)`` fails the moment test, i.e. the solver residual is not
        optimal enough for y to satisfy the boundary conditions at 1.
    """
    if not 1 < spec.p < inf:
        raise DomainError("extremal witness needs 1 < p < inf")
    q = float(spec.q)
    n, k, a = spec.n, spec.k, spec.a
    sol = A_solution(spec) if solution is None else solution
    r = sol.residual.to_float()
    moments = power_moments(r, q - 1.0, n - 1)
    Iq = float(lq_integral(r, q))
    scale = Iq ** ((q - 1.0) / q)
    for j, mj in enumerate(moments):
        if abs(mj) > tol * scale:
            raise MomentError(
                f"witness moment {j} is {mj:.3e}, above {tol:.0e} * ||r||^(q-1)",
                index=j, value=float(mj),
            )
    # y^(k)(a) from the Taylor formula at 0 (y has zero data there)
    t, w, s = power_rule(r, q - 1.0)
    e = n - k - 1
    mask = t < float(a)
    yk = float(np.sum(w[mask] * s[mask] * (float(a) - t[mask]) ** e) / factorial(e))
    norm_p = Iq ** (1.0 / float(spec.p))
    ratio = yk / norm_p
    return ExtremalWitness(spec, r, q, np.asarray(moments), yk, norm_p, ratio, float(sol.value))


# -- shape of the profile around a = 1/2 ------------------------------------------------

def hypothesis_check(n: int, k: int, p, grid: int = 2001, jobs: int = 1, rows=None,
                     tol: float = 1e-9) -> dict:
    """Shape of the profile a -> A_{n,k,p}(a) around a = 1/2.

    Reports the sampled global maximiser, the discrete second difference at
    1/2 and whether the local maximum nearest 1/2 is global.  A verdict is
    given only where the answer is known: p = 2 (even k: global max at 1/2;
    odd k: local min at 1/2, global max at the nearest local max) and
    p = inf, k = n-1 (maxima at ``sin^2(pi j/(2(n+1)))``; global at 1/2 for
    odd n and at the two middle points for even n).  Otherwise ``verdict``
    is None.
    """
    if grid % 2 == 0:
        raise DomainError("grid must be odd so that a = 1/2 is sampled")
    if rows is None:
        rows = A_profile(n, k, p, grid, jobs=jobs)
    a = np.array([r.a for r in rows])
    A = np.array([r.A for r in rows])
    mid = int(np.argmin(np.abs(a - 0.5)))
    h = a[1] - a[0]
    second_diff = (A[mid + 1] - 2 * A[mid] + A[mid - 1]) / h ** 2
    gmax = float(np.nanmax(A))
    global_idx = [i for i in range(len(A)) if A[i] >= gmax - tol * max(1.0, gmax)]
    peaks = sampled_local_maxima(rows, PEAK_RTOL)
    peaks_far = sorted(peaks, key=lambda i: (abs(a[i] - 0.5), a[i]))
    nearest = peaks_far[0] if peaks_far else None
    nearest_is_global = nearest is not None and A[nearest] >= gmax - tol * max(1.0, gmax)
    report = {
        "n": n, "k": k, "p": format_p(p), "grid": grid,
        "global_max": gmax,
        "global_argmax": [float(a[i]) for i in global_idx],
        "A_half": float(A[mid]),
        "second_difference_half": float(second_diff),
        "local_maxima": [float(a[i]) for i in peaks],
        "nearest_local_max": float(a[nearest]) if nearest is not None else None,
        "nearest_is_global": bool(nearest_is_global),
        "verdict": None,
        "checks": {},
    }
    checks = {}
    if p == 2:
        if k % 2 == 0:
            checks["global_max_at_half"] = any(abs(a[i] - 0.5) <= 1e-3 for i in global_idx)
        else:
            checks["local_min_at_half"] = bool(second_diff > 0)
            checks["nearest_local_max_is_global"] = bool(nearest_is_global)
    elif p == inf and k == n - 1:
        h_tol = 2 * h
        targets = local_max_points(n)
        found = [float(a[i]) for i in peaks]
        checks["local_maxima_at_a_j"] = len(found) == n and all(
            abs(x - t) <= h_tol for x, t in zip(sorted(found), targets)
        )
        if n % 2 == 1:
            want = [0.5]
        else:
            want = [targets[n // 2 - 1], targets[n // 2]]
        checks["global_max_location"] = all(
            any(abs(a[i] - t) <= h_tol for i in global_idx) for t in want
        )
    if checks:
        report["verdict"] = all(checks.values())
        report["checks"] = checks
    return report
