"""Dantzig selector, Lasso, Chebyshev fit and the orthogonal soft-threshold.

Scale conventions
-----------------
The Lasso objective is exactly ``|Y - X b|^2 + lam * sum |b_j|`` (no 1/2 or
1/n), and the Dantzig constraint is the raw ``|X^T (Y - X b)|_inf <= lam``.
On an orthogonal design with ``X^T X = n I`` both reduce to soft
thresholding of ``z = X^T Y / n``:

* ``dantzig_fit(lam)``     -> ``soft(z, lam / n)``
* ``lasso_fit(2 * lam)``   -> ``soft(z, lam / n)``

so a Lasso penalty corresponds to twice the Dantzig bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateFitError, NumericalFailure, RankDeficientError
from .lp import LinearProgram, lp_solve
from .problem import CoefficientVector, RegressionProblem, least_squares

METHODS = ("dantzig", "lasso", "chebyshev", "soft-threshold")

LASSO_TOL = 1e-10
LASSO_MAX_SWEEPS = 10_000
KKT_TOL = 1e-6
FEASIBILITY_TOL = 1e-6
ORTHOGONALITY_RTOL = 1e-8
REFINE_EVERY = 20


@dataclass(frozen=True)
class FitResult:
    coefficients: CoefficientVector
    lam: float
    method: str
    objective_value: float
    iterations: int
    converged: bool
    info: dict = field(default_factory=dict, compare=False)

    @property
    def beta(self) -> np.ndarray:
        return self.coefficients.values

    @property
    def support(self) -> list[int]:
        return self.coefficients.support

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "lambda": float(self.lam),
            "coefficients": [float(v) for v in self.beta],
            "objective": float(self.objective_value),
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
            "support": self.support,
        }


def soft_threshold(z, t):
    """``sign(z) * max(|z| - t, 0)``, elementwise."""
    if np.any(np.asarray(t) < 0):
        raise ValueError("threshold must be nonnegative")
    z = np.asarray(z, dtype=float)
    out = np.sign(z) * np.maximum(np.abs(z) - t, 0.0)
    return float(out) if out.ndim == 0 else out


def lambda_default(n, p, sigma) -> float:
    """Dantzig bound ``sigma * sqrt(2 n log p)`` for the raw constraint.

    On the unit-diagonal scale this is the familiar ``sigma * sqrt(2 log p /
    n)`` multiplied by ``n``.  The Lasso counterpart is twice this value.
    """
    return float(sigma) * math.sqrt(2.0 * n * math.log(max(p, 1)))


def correlation_residual(problem: RegressionProblem, beta) -> np.ndarray:
    """``X^T (Y - X beta)``."""
    x = problem.design
    return x.T @ (problem.response - x @ np.asarray(beta, dtype=float))


def dantzig_violation(problem, beta, lam) -> float:
    """Amount by which ``|X^T (Y - X beta)|_inf`` exceeds ``lam`` (<= 0 if feasible)."""
    return float(np.max(np.abs(correlation_residual(problem, beta))) - lam)


def lasso_kkt_residual(problem, beta, lam, support_tol=1e-8) -> float:
    """Largest violation of the Lasso stationarity conditions.

    Active coordinates need ``2 X_j^T r = lam * sign(b_j)``; inactive ones
    need ``|2 X_j^T r| <= lam``.
    """
    beta = np.asarray(beta, dtype=float)
    g = 2.0 * correlation_residual(problem, beta)
    active = np.abs(beta) > support_tol
    res = np.zeros_like(g)
    res[active] = np.abs(g[active] - lam * np.sign(beta[active]))
    res[~active] = np.maximum(np.abs(g[~active]) - lam, 0.0)
    return float(res.max(initial=0.0))


# ------------------------------------------------------------------ Lasso


def _refine(x, y, beta, r, active, half_lam):
    """Solve the stationarity equations on the current sign pattern.

    With support ``A`` and signs ``s`` the Lasso solution satisfies
    ``X_A^T X_A b = X_A^T Y - (lam / 2) s``.  The candidate is accepted only
    if it keeps the signs and the other active coordinates stay at zero.
    """
    a = [j for j in active if beta[j] != 0.0]
    if not a:
        return False
    xa = x[:, a]
    g = xa.T @ xa
    w = np.linalg.eigvalsh(g)
    if w[0] <= 1e-10 * w[-1]:
        return False
    signs = np.sign(beta[a])
    b = np.linalg.solve(g, xa.T @ y - half_lam * signs)
    if np.any(np.sign(b) != signs):
        return False
    resid = y - xa @ b
    rest = [j for j in active if beta[j] == 0.0]
    if rest and np.max(np.abs(x[:, rest].T @ resid)) > half_lam * (1.0 + 1e-12) + 1e-12:
        return False
    beta[a] = b
    r[:] = resid
    return True


def _cd_sweeps(x, y, col_sq, beta, r, active, half_lam, max_sweeps, tol):
    """Cyclic coordinate descent over ``active`` (ascending order).

    Every ``REFINE_EVERY`` sweeps with an unchanged sign pattern the exact
    solution for that pattern is tried, which rescues ill-conditioned
    problems where plain coordinate descent crawls.
    """
    sweeps = 0
    pattern = None
    while sweeps < max_sweeps:
        sweeps += 1
        max_change = 0.0
        for j in active:
            xj = x[:, j]
            old = beta[j]
            z = xj @ r + col_sq[j] * old
            new = math.copysign(max(abs(z) - half_lam, 0.0), z) / col_sq[j]
            if new != old:
                r -= xj * (new - old)
                beta[j] = new
                max_change = max(max_change, abs(new - old))
        if max_change <= tol:
            return sweeps, True
        if sweeps % REFINE_EVERY == 0:
            current = np.sign(beta[active]).tobytes()
            if current == pattern and _refine(x, y, beta, r, active, half_lam):
                return sweeps, True
            pattern = current
    return sweeps, False


def _lasso_at(x, y, col_sq, beta, lam, max_sweeps, tol):
    r = y - x @ beta
    half_lam = 0.5 * lam
    active = set(np.flatnonzero(beta).tolist())
    active |= set(np.flatnonzero(np.abs(2.0 * (x.T @ r)) > lam).tolist())
    total = 0
    while True:
        order = sorted(active)
        sweeps, ok = _cd_sweeps(x, y, col_sq, beta, r, order, half_lam, max_sweeps - total, tol)
        total += sweeps
        if not ok:
            return total, False
        r = y - x @ beta
        grad = np.abs(2.0 * (x.T @ r))
        grad[order] = 0.0
        viol = np.flatnonzero(grad > lam * (1.0 + 1e-12) + 1e-12)
        if viol.size == 0:
            return total, True
        active |= set(viol.tolist())


def lasso_fit(problem: RegressionProblem, lam, beta_init=None, max_sweeps=LASSO_MAX_SWEEPS, tol=LASSO_TOL) -> FitResult:
    """Minimize ``|Y - X b|^2 + lam * |b|_1`` by cyclic coordinate descent.

    Coordinates are visited in the fixed order ``0..p-1`` restricted to an
    active set that is enlarged until no inactive coordinate violates its
    KKT condition.  Without ``beta_init`` the solution is reached along a
    short geometric sequence of penalties from ``2 |X^T Y|_inf`` down to
    ``lam``, each stage starting from the previous solution; this keeps
    coordinate descent on the minimum-l1 branch when columns are collinear.
    Non-convergence after ``max_sweeps`` sweeps is reported in the result,
    not raised.
    """
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    x = np.asfortranarray(problem.design)
    y = problem.response
    p = problem.p
    col_sq = np.sum(x * x, axis=0)
    if np.any(col_sq == 0):
        raise ValueError("design has an identically zero column")
    lam_max = 2.0 * float(np.max(np.abs(x.T @ y)))
    beta = np.zeros(p) if beta_init is None else np.array(beta_init, dtype=float)

    if beta_init is None and lam >= lam_max:
        stages = []
    elif beta_init is None:
        floor = max(lam, 1e-6 * lam_max)
        n_stages = max(1, int(math.ceil(10 * math.log10(lam_max / floor))))
        stages = list(np.geomspace(lam_max, floor, n_stages + 1)[1:])
        if lam < floor:
            stages.append(lam)
        stages[-1] = lam
    else:
        stages = [lam]

    sweeps = 0
    converged = True
    for stage_lam in stages:
        used, ok = _lasso_at(x, y, col_sq, beta, float(stage_lam), max_sweeps - sweeps, tol)
        sweeps += used
        if not ok:
            converged = False
            break
    r = y - x @ beta
    obj = float(r @ r + lam * np.sum(np.abs(beta)))
    info = {"kkt_residual": lasso_kkt_residual(problem, beta, lam), "stages": len(stages)}
    return FitResult(CoefficientVector(beta), float(lam), "lasso", obj, sweeps, converged, info)


# ---------------------------------------------------------------- Dantzig


def dantzig_lp(problem: RegressionProblem, lam) -> LinearProgram:
    """The Dantzig selector as an LP in ``(beta, u)``.

    minimize ``sum u`` subject to ``-u <= beta <= u`` and
    ``-lam <= X^T (Y - X beta) <= lam``.
    """
    x = problem.design
    p = problem.p
    g = x.T @ x
    c = x.T @ problem.response
    eye = np.eye(p)
    zero = np.zeros((p, p))
    a_ub = np.block([[eye, -eye], [-eye, -eye], [-g, zero], [g, zero]])
    b_ub = np.concatenate([np.zeros(2 * p), lam - c, lam + c])
    lower = np.concatenate([np.full(p, -np.inf), np.zeros(p)])
    return LinearProgram(np.concatenate([np.zeros(p), np.ones(p)]), a_ub, b_ub, lower=lower)


def _restricted_dantzig(g_ca, c_c, lam, k, method):
    """LP over variables ``A`` (|A| = k) and constraint rows ``C``."""
    m = g_ca.shape[0]
    eye = np.eye(k)
    zcm = np.zeros((m, k))
    a_ub = np.block([[eye, -eye], [-eye, -eye], [-g_ca, zcm], [g_ca, zcm]])
    b_ub = np.concatenate([np.zeros(2 * k), lam - c_c, lam + c_c])
    lower = np.concatenate([np.full(k, -np.inf), np.zeros(k)])
    lp = LinearProgram(np.concatenate([np.zeros(k), np.ones(k)]), a_ub, b_ub, lower=lower)
    res = lp_solve(lp, method=method)
    if not res.success:
        raise NumericalFailure(f"restricted Dantzig LP returned status {res.status}")
    y = res.ineq_marginals
    return res.x[:k], y[2 * k : 2 * k + m], y[2 * k + m :], res.iterations


def dantzig_fit(problem: RegressionProblem, lam, method="simplex", max_rounds=200, batch=25) -> FitResult:
    """Dantzig selector: minimize ``|b|_1`` subject to ``|X^T (Y - X b)|_inf <= lam``.

    The LP (:func:`dantzig_lp`) is solved exactly by working sets.  A
    restricted LP over variables ``A`` and constraint rows ``C`` (with ``C``
    a subset of ``A``, which keeps it feasible) is solved by the simplex; then
    violated constraints are added to ``C`` and variables with a negative
    reduced cost (``|sum_j mu_j G_jk| > 1`` in terms of the row duals) are
    added to ``A``.  When neither check finds anything the restricted vertex
    is optimal for the full problem.  The sets are seeded from the support of
    ``lasso_fit(2 lam)``.
    """
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    x = np.asfortranarray(problem.design)
    y = problem.response
    n, p = problem.n, problem.p
    c = x.T @ y
    if lam >= np.max(np.abs(c)):
        return FitResult(CoefficientVector(np.zeros(p)), float(lam), "dantzig", 0.0, 0, True,
                         {"rounds": 0, "working_set": 0})
    # rows are divided by n so tableau entries are O(1)
    cs = c / n
    lam_s = lam / n
    feas_tol = 1e-9 * max(1.0, lam_s)

    warm = lasso_fit(problem, 2.0 * lam)
    A = set(warm.support) or {int(np.argmax(np.abs(c)))}
    r = y - x @ warm.beta
    near = np.flatnonzero(np.abs(x.T @ r) / n >= lam_s * (1 - 1e-6))
    A |= set(near[:batch].tolist())
    C = set(A)

    iters = 0
    beta = np.zeros(p)
    for rnd in range(1, max_rounds + 1):
        a_idx = np.array(sorted(A))
        c_idx = np.array(sorted(C))
        g_c = (x[:, c_idx].T @ x) / n
        b_a, y_minus, y_plus, it = _restricted_dantzig(g_c[:, a_idx], cs[c_idx], lam_s, a_idx.size, method)
        iters += it
        beta = np.zeros(p)
        beta[a_idx] = b_a
        corr = (x.T @ (y - x @ beta)) / n
        viol = np.abs(corr) - lam_s
        new_rows = [j for j in np.argsort(-viol)[:batch] if viol[j] > feas_tol and j not in C]
        price = (y_plus - y_minus) @ g_c
        price[a_idx] = 0.0
        reduced = np.abs(price) - 1.0
        new_vars = [k for k in np.argsort(-reduced)[:batch] if reduced[k] > 1e-9 and k not in A]
        if not new_rows and not new_vars:
            break
        C |= set(int(j) for j in new_rows)
        A |= set(int(j) for j in new_rows) | set(int(k) for k in new_vars)
    else:
        raise NumericalFailure("Dantzig working-set iteration did not terminate")
    obj = float(np.sum(np.abs(beta)))
    info = {
        "rounds": rnd,
        "working_set": len(A),
        "constraint_set": len(C),
        "max_violation": dantzig_violation(problem, beta, lam),
    }
    return FitResult(CoefficientVector(beta), float(lam), "dantzig", obj, iters, True, info)


# -------------------------------------------------------------- Chebyshev


def chebyshev_fit(problem: RegressionProblem, method="simplex") -> FitResult:
    """Minimize ``max_i |Y_i - (X b)_i|`` as an LP in ``(b, t)``."""
    x = problem.design
    y = problem.response
    n, p = problem.n, problem.p
    ones = np.ones((n, 1))
    a_ub = np.block([[x, -ones], [-x, -ones]])
    b_ub = np.concatenate([y, -y])
    # t <= max|Y| holds at the optimum (b = 0 attains it) and t >= 0 is implied,
    # so this bounding gives the simplex a feasible all-slack starting basis
    lower = np.full(p + 1, -np.inf)
    upper = np.full(p + 1, np.inf)
    upper[-1] = float(np.max(np.abs(y)))
    c = np.zeros(p + 1)
    c[-1] = 1.0
    res = lp_solve(LinearProgram(c, a_ub, b_ub, lower=lower, upper=upper), method=method)
    if not res.success:
        raise NumericalFailure(f"Chebyshev LP returned status {res.status}")
    beta = res.x[:p]
    obj = float(np.max(np.abs(y - x @ beta)))
    return FitResult(CoefficientVector(beta), 0.0, "chebyshev", obj, res.iterations, True,
                     {"lp_method": res.method})


# ---------------------------------------------------------- closed forms


def soft_threshold_fit(problem: RegressionProblem, lam) -> FitResult:
    """Closed-form Dantzig/Lasso solution ``soft(X^T Y / n, lam / n)``.

    Valid only for orthogonal designs (``X^T X = n I``); ``lam`` is on the
    Dantzig scale.
    """
    x = problem.design
    n = problem.n
    g = x.T @ x
    if np.max(np.abs(g - n * np.eye(problem.p))) > ORTHOGONALITY_RTOL * n:
        raise ValueError("soft-threshold fit requires X^T X = n I")
    beta = soft_threshold(x.T @ problem.response / n, lam / n)
    beta = np.atleast_1d(beta)
    return FitResult(CoefficientVector(beta), float(lam), "soft-threshold", float(np.sum(np.abs(beta))), 0, True)


def fit(problem: RegressionProblem, method, lam=None) -> FitResult:
    if method == "dantzig":
        return dantzig_fit(problem, lam)
    if method == "lasso":
        return lasso_fit(problem, lam)
    if method == "chebyshev":
        return chebyshev_fit(problem)
    if method == "soft-threshold":
        return soft_threshold_fit(problem, lam)
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------- noise level


def estimate_sigma(problem: RegressionProblem, seed=0, folds=5, grid_c=0.5) -> float:
    """Residual root-mean-square after a cross-validated Lasso fit.

    The Lasso penalty is chosen by :func:`dantzig_lab.cv.select_lambda` on a
    grid centred at a pilot scale (the RMS of ``Y``); the Lasso is refit on
    all rows, least squares is refit on its support ``S``, and
    ``sqrt(RSS / (n - |S|))`` is returned.
    """
    from .cv import select_lambda

    n = problem.n
    if n < 3:
        raise ValueError("estimate_sigma needs n >= 3")
    y = problem.response
    folds = max(1, min(folds, n // 2))
    pilot = float(np.sqrt(np.mean(y * y)))
    if pilot == 0.0:
        return 0.0
    lam = select_lambda(problem, "lasso", pilot, folds=folds, grid_c=grid_c, seed=seed).chosen_lambda
    support = lasso_fit(problem, lam).support
    if len(support) >= n:
        raise DegenerateFitError(f"Lasso support of size {len(support)} leaves no residual degrees of freedom")
    if not support:
        return float(np.sqrt(y @ y / n))
    try:
        ls = least_squares(problem, support)
    except RankDeficientError as exc:
        raise DegenerateFitError(str(exc)) from exc
    return float(np.sqrt(ls.residual_mean_square))
