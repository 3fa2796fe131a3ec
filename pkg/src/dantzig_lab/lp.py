"""Dense linear programming shared by the Dantzig and Chebyshev fitters.

Problems are stated as::

    minimize    c @ x
    subject to  A_ub @ x <= b_ub
                A_eq @ x == b_eq
                lower <= x <= upper        (infinite bounds allowed)

and solved by a two-phase tableau simplex that prices by largest reduced cost
and switches to Bland's smallest-index rule once degenerate pivots stall, so
it never cycles and returns an exact vertex.  If the pivot count blows up
the problem is handed to the HiGHS interior-point solver as a fallback; the
same solver double-checks any non-optimal verdict or infeasible vertex.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import NumericalFailure

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-9
CHECK_TOL = 1e-7
STALL_LIMIT = 50


@dataclass(frozen=True)
class LinearProgram:
    c: np.ndarray
    A_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    A_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).reshape(-1)
        nv = c.size
        object.__setattr__(self, "c", c)
        for a_name, b_name in (("A_ub", "b_ub"), ("A_eq", "b_eq")):
            a = getattr(self, a_name)
            b = getattr(self, b_name)
            if a is None:
                a = np.zeros((0, nv))
                b = np.zeros(0)
            a = np.atleast_2d(np.asarray(a, dtype=float))
            b = np.asarray(b, dtype=float).reshape(-1)
            if a.shape[1] != nv or a.shape[0] != b.size:
                raise ValueError(f"inconsistent dimensions for {a_name}/{b_name}")
            if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
                raise ValueError(f"{a_name}/{b_name} must be finite")
            object.__setattr__(self, a_name, a)
            object.__setattr__(self, b_name, b)
        lo = np.zeros(nv) if self.lower is None else np.broadcast_to(np.asarray(self.lower, float), (nv,)).copy()
        hi = np.full(nv, np.inf) if self.upper is None else np.broadcast_to(np.asarray(self.upper, float), (nv,)).copy()
        if np.any(lo == np.inf) or np.any(hi == -np.inf) or np.any(lo > hi):
            raise ValueError("invalid variable bounds")
        if not np.all(np.isfinite(c)):
            raise ValueError("objective must be finite")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def n_vars(self) -> int:
        return self.c.size


@dataclass(frozen=True)
class LpResult:
    x: np.ndarray | None
    fun: float | None
    status: str
    ineq_marginals: np.ndarray | None
    eq_marginals: np.ndarray | None
    iterations: int
    method: str

    @property
    def success(self) -> bool:
        return self.status == OPTIMAL


class _IterationLimit(Exception):
    pass


def _pivot(t, row, col):
    t[row] /= t[row, col]
    colv = t[:, col].copy()
    colv[row] = 0.0
    rows = np.flatnonzero(colv)
    t[rows] -= np.outer(colv[rows], t[row])


def _run_simplex(t, basis, n_cols, allowed, max_iter, counter):
    """Primal simplex on tableau ``t`` whose last row holds reduced costs.

    The entering column is the most negative reduced cost until
    ``STALL_LIMIT`` consecutive degenerate pivots occur; from then on Bland's
    smallest-index rule is used, which cannot cycle.  Only columns flagged in
    ``allowed`` may enter.  Returns False when the objective is unbounded
    below.
    """
    m = t.shape[0] - 1
    bland = False
    stall = 0
    while True:
        red = t[-1, :n_cols]
        cand = np.flatnonzero((red < -PIVOT_TOL) & allowed)
        if cand.size == 0:
            return True
        col = cand[0] if bland else cand[np.argmin(red[cand])]
        colv = t[:m, col]
        pos = colv > PIVOT_TOL
        if not np.any(pos):
            return False
        ratios = np.full(m, np.inf)
        ratios[pos] = t[:m, -1][pos] / colv[pos]
        best = ratios.min()
        tied = np.flatnonzero(ratios <= best + PIVOT_TOL * max(1.0, abs(best)))
        row = tied[np.argmin(np.asarray(basis)[tied])]
        stall = stall + 1 if best <= FEAS_TOL else 0
        bland = bland or stall >= STALL_LIMIT
        _pivot(t, row, col)
        basis[row] = col
        counter[0] += 1
        if counter[0] > max_iter:
            raise _IterationLimit


def _standard_form(lp: LinearProgram):
    """Map ``x = x0 + T z`` with ``z >= 0`` and collect the row blocks."""
    nv = lp.n_vars
    cols = []
    x0 = np.zeros(nv)
    bound_rows = []  # (z index, upper) for finite two-sided bounds
    for j in range(nv):
        lo, hi = lp.lower[j], lp.upper[j]
        if np.isfinite(lo):
            x0[j] = lo
            cols.append((j, 1.0))
            if np.isfinite(hi):
                bound_rows.append((len(cols) - 1, hi - lo))
        elif np.isfinite(hi):
            x0[j] = hi
            cols.append((j, -1.0))
        else:
            cols.append((j, 1.0))
            cols.append((j, -1.0))
    nz = len(cols)
    t_map = np.zeros((nv, nz))
    for k, (j, sgn) in enumerate(cols):
        t_map[j, k] = sgn
    a_ub = lp.A_ub @ t_map
    b_ub = lp.b_ub - lp.A_ub @ x0
    if bound_rows:
        extra = np.zeros((len(bound_rows), nz))
        for r, (k, width) in enumerate(bound_rows):
            extra[r, k] = 1.0
        a_ub = np.vstack([a_ub, extra])
        b_ub = np.concatenate([b_ub, [w for _, w in bound_rows]])
    a_eq = lp.A_eq @ t_map
    b_eq = lp.b_eq - lp.A_eq @ x0
    return t_map, x0, a_ub, b_ub, a_eq, b_eq


def _simplex(lp: LinearProgram, max_iter):
    t_map, x0, a_ub, b_ub, a_eq, b_eq = _standard_form(lp)
    nz = t_map.shape[1]
    m_ub, m_eq = a_ub.shape[0], a_eq.shape[0]
    m = m_ub + m_eq
    cz = lp.c @ t_map

    # rows: [A_ub I ; A_eq 0] (z, s) = b, then sign-flip rows with b < 0
    a = np.zeros((m, nz + m_ub))
    a[:m_ub, :nz] = a_ub
    a[:m_ub, nz:] = np.eye(m_ub)
    a[m_ub:, :nz] = a_eq
    b = np.concatenate([b_ub, b_eq])
    flip = b < 0
    a[flip] *= -1.0
    b = np.where(flip, -b, b)
    n_real = nz + m_ub

    needs_art = np.ones(m, dtype=bool)
    needs_art[:m_ub] = flip[:m_ub]
    art_rows = np.flatnonzero(needs_art)
    n_art = art_rows.size
    n_cols = n_real + n_art

    t = np.zeros((m + 1, n_cols + 1))
    t[:m, :n_real] = a
    t[:m, -1] = b
    basis = []
    k = 0
    for i in range(m):
        if needs_art[i]:
            t[i, n_real + k] = 1.0
            basis.append(n_real + k)
            k += 1
        else:
            basis.append(nz + i)
    counter = [0]

    if n_art:
        # phase I objective: sum of artificials, priced out against the basis
        t[-1, :] = 0.0
        t[-1, n_real:n_cols] = 1.0
        for i in art_rows:
            t[-1] -= t[i]
        allowed = np.ones(n_cols, dtype=bool)
        _run_simplex(t, basis, n_cols, allowed, max_iter, counter)
        if -t[-1, -1] > FEAS_TOL * max(1.0, np.max(np.abs(b), initial=0.0)):
            return LpResult(None, None, INFEASIBLE, None, None, counter[0], "simplex")
        # drive artificial variables out of the basis, dropping redundant rows
        keep = np.ones(m, dtype=bool)
        for i in range(m):
            if basis[i] >= n_real:
                row = t[i, :n_real]
                nzc = np.flatnonzero(np.abs(row) > PIVOT_TOL)
                if nzc.size:
                    _pivot(t, i, nzc[0])
                    basis[i] = nzc[0]
                else:
                    keep[i] = False
        t = np.vstack([t[:m][keep], t[-1:]])
        t = np.hstack([t[:, :n_real], t[:, -1:]])
        basis = [bi for bi, kp in zip(basis, keep) if kp]
        a = a[keep]
        b = b[keep]
        row_ids = np.flatnonzero(keep)
    else:
        t = np.hstack([t[:, :n_real], t[:, -1:]])
        row_ids = np.arange(m)

    cost = np.concatenate([cz, np.zeros(m_ub)])
    mk = t.shape[0] - 1
    t[-1, :n_real] = cost
    t[-1, -1] = 0.0
    for i in range(mk):
        t[-1] -= cost[basis[i]] * t[i]
    allowed = np.ones(n_real, dtype=bool)
    bounded = _run_simplex(t, basis, n_real, allowed, max_iter, counter)
    if not bounded:
        return LpResult(None, None, UNBOUNDED, None, None, counter[0], "simplex")

    # recompute the vertex and duals from the final basis for accuracy
    bmat = a[:, basis]
    try:
        if mk == 0:
            raise np.linalg.LinAlgError
        xb = np.linalg.solve(bmat, b)
        y = np.linalg.solve(bmat.T, cost[basis])
    except np.linalg.LinAlgError:
        xb = t[:mk, -1].copy()
        y = None
    z_full = np.zeros(n_real)
    z_full[basis] = np.maximum(xb, 0.0)
    x = x0 + t_map @ z_full[:nz]
    duals = np.zeros(m)
    if y is not None:
        duals[row_ids] = y
        duals[flip] *= -1.0
    ineq = duals[: lp.A_ub.shape[0]]
    eq = duals[m_ub:]
    fun = float(lp.c @ x)
    return LpResult(x, fun, OPTIMAL, ineq, eq, counter[0], "simplex")


def _highs(lp: LinearProgram, method):
    bounds = [
        (None if not np.isfinite(lo) else lo, None if not np.isfinite(hi) else hi)
        for lo, hi in zip(lp.lower, lp.upper)
    ]
    res = linprog(
        lp.c,
        A_ub=lp.A_ub if lp.A_ub.size else None,
        b_ub=lp.b_ub if lp.b_ub.size else None,
        A_eq=lp.A_eq if lp.A_eq.size else None,
        b_eq=lp.b_eq if lp.b_eq.size else None,
        bounds=bounds,
        method=method,
    )
    status = {0: OPTIMAL, 2: INFEASIBLE, 3: UNBOUNDED}.get(res.status)
    if status is None:
        raise NumericalFailure(f"interior-point fallback failed: {res.message}")
    if status != OPTIMAL:
        return LpResult(None, None, status, None, None, int(res.nit), method)
    ineq = res.ineqlin.marginals if lp.A_ub.size else np.zeros(0)
    eq = res.eqlin.marginals if lp.A_eq.size else np.zeros(0)
    return LpResult(res.x, float(res.fun), OPTIMAL, ineq, eq, int(res.nit), method)


def lp_solve(lp: LinearProgram, method="simplex", max_iter=None) -> LpResult:
    """Solve ``lp``.

    ``method="simplex"`` (default) runs the tableau simplex and falls back
    to HiGHS interior point once ``max_iter`` pivots (default ``50 (m + n) +
    1000``) are exceeded.  A non-optimal verdict, or an optimal vertex that
    violates a constraint by more than ``CHECK_TOL``, is re-checked there too.
    ``method="interior-point"`` goes straight to the
    fallback.  Marginals follow the usual sensitivity convention
    ``d(optimum)/d(rhs)``, so inequality marginals of a minimization are
    nonpositive.
    """
    if method == "interior-point":
        return _highs(lp, "highs-ipm")
    if method != "simplex":
        raise ValueError(f"unknown LP method {method!r}")
    if max_iter is None:
        max_iter = 50 * (lp.A_ub.shape[0] + lp.A_eq.shape[0] + lp.n_vars) + 1000
    try:
        res = _simplex(lp, max_iter)
    except _IterationLimit:
        return _highs(lp, "highs-ipm")
    if res.success and _primal_violation(lp, res.x) <= CHECK_TOL:
        return res
    # tableau drift on a near-singular basis can fake infeasibility or leave
    # a slightly infeasible vertex; confirm with the interior-point solver
    check = _highs(lp, "highs-ipm")
    return check if check.success else res


def _primal_violation(lp, x) -> float:
    """Largest constraint violation of ``x``, relative to the data scale."""
    parts = [np.zeros(1), lp.lower - x, x - lp.upper]
    scale = 1.0
    if lp.A_ub.size:
        parts.append(lp.A_ub @ x - lp.b_ub)
        scale = max(scale, np.max(np.abs(lp.b_ub)))
    if lp.A_eq.size:
        parts.append(np.abs(lp.A_eq @ x - lp.b_eq))
        scale = max(scale, np.max(np.abs(lp.b_eq)))
    worst = max(np.max(v[np.isfinite(v)], initial=0.0) for v in parts)
    return float(worst / scale)
