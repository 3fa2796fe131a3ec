"""Cross-validated choice of the tuning parameter.

Held-out test sets have size about ``log n``; each of ``V`` disjoint test
sets is predicted from a fit on the remaining rows for every grid value, and
the value with the smallest mean squared prediction error wins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateFoldError
from .estimators import dantzig_fit, lambda_default, lasso_fit

DEFAULT_FOLDS = 5
DEFAULT_GRID_C = 0.5
MIN_GRID_POINTS = 10


def default_test_size(n, folds=DEFAULT_FOLDS) -> int:
    t = max(1, math.ceil(math.log(n)))
    if t * folds > n:
        t = n // folds
    return t


def default_grid(problem, sigma_hat, c=DEFAULT_GRID_C, method="dantzig") -> np.ndarray:
    """Arithmetic grid of penalties around ``lambda_default``.

    The step is ``c * sigma_hat * sqrt(n log p)``: the unit-scale width
    ``c sqrt(log p / n)`` converted to raw-Gram units by the factor ``n``
    (and made scale-equivariant through ``sigma_hat``).  The grid contains
    ``lambda_default`` exactly, steps outward from it by that width, and is
    closed by the endpoints ``lambda_default / 10`` and ``10 lambda_default``.
    If that gives fewer than 10 points the step is shrunk until it does not.
    For ``method="lasso"`` every value is doubled.
    """
    if sigma_hat <= 0:
        raise ValueError("sigma_hat must be positive")
    if c <= 0:
        raise ValueError("grid constant c must be positive")
    n, p = problem.n, problem.p
    center = lambda_default(n, p, sigma_hat)
    if center == 0.0:
        # p == 1: log p vanishes, fall back to a scale set by the data
        center = sigma_hat * math.sqrt(2.0 * n)
    lo, hi = center / 10.0, 10.0 * center
    step = c * sigma_hat * math.sqrt(n * math.log(max(p, 2)))

    def build(h):
        below = center - h * np.arange(1, int((center - lo) / h) + 1)
        above = center + h * np.arange(1, int((hi - center) / h) + 1)
        pts = np.concatenate([[lo], below[below > lo], [center], above[above < hi], [hi]])
        return np.unique(pts)

    grid = build(step)
    while grid.size < MIN_GRID_POINTS:
        step /= 2.0
        grid = build(step)
    return 2.0 * grid if method == "lasso" else grid


@dataclass(frozen=True)
class CvPlan:
    grid: np.ndarray
    method: str = "dantzig"
    folds: int = DEFAULT_FOLDS
    test_size: int | None = None
    seed: int = 0

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float).reshape(-1)
        if g.size == 0 or np.any(g < 0) or np.any(np.diff(g) <= 0):
            raise ValueError("grid must be nonempty, nonnegative and strictly ascending")
        if self.method not in ("dantzig", "lasso"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.folds < 1:
            raise ValueError("folds must be >= 1")
        if self.test_size is not None and self.test_size < 1:
            raise ValueError("test_size must be >= 1")
        object.__setattr__(self, "grid", g)


@dataclass(frozen=True)
class CvResult:
    chosen_lambda: float
    lambdas: np.ndarray
    mean_error: np.ndarray
    std_error: np.ndarray
    fold_errors: np.ndarray  # shape (folds, grid)
    test_folds: list = field(repr=False)
    method: str = "dantzig"

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "chosen_lambda": float(self.chosen_lambda),
            "curve": [
                {"lambda": float(l), "mean_error": float(m), "std_error": float(s)}
                for l, m, s in zip(self.lambdas, self.mean_error, self.std_error)
            ],
            "test_folds": [[int(i) for i in f] for f in self.test_folds],
        }


def fold_assignment(n, folds, test_size, rng):
    perm = rng.permutation(n)
    return [np.sort(perm[v * test_size : (v + 1) * test_size]) for v in range(folds)]


def _fit(problem, method, lam):
    return dantzig_fit(problem, lam) if method == "dantzig" else lasso_fit(problem, lam)


def _degenerate(design):
    return np.any(np.sum(design * design, axis=0) == 0.0)


def cross_validate(problem, plan: CvPlan) -> CvResult:
    """V-fold cross-validation over ``plan.grid``.

    The minimizing grid value is chosen; exact ties go to the largest
    (most regularized) value, because every penalty beyond the point where
    all folds fit the zero vector produces an identical error.
    """
    n = problem.n
    test_size = plan.test_size or default_test_size(n, plan.folds)
    if test_size < 1 or test_size * plan.folds > n or n - test_size < 2:
        raise ValueError(f"{plan.folds} folds of {test_size} observations do not fit in n={n}")
    rng = np.random.default_rng(np.random.SeedSequence(plan.seed))
    for attempt in range(2):
        folds = fold_assignment(n, plan.folds, test_size, rng)
        if not any(_degenerate(np.delete(problem.design, f, axis=0)) for f in folds):
            break
    else:
        raise DegenerateFoldError("a training split has an identically zero column")

    errors = np.empty((plan.folds, plan.grid.size))
    for v, test in enumerate(folds):
        train = problem.subset_rows(np.setdiff1d(np.arange(n), test))
        xt = problem.design[test]
        yt = problem.response[test]
        for k, lam in enumerate(plan.grid):
            beta = _fit(train, plan.method, lam).beta
            resid = yt - xt @ beta
            errors[v, k] = resid @ resid / test.size
    mean = errors.mean(axis=0)
    std = errors.std(axis=0, ddof=1) / math.sqrt(plan.folds) if plan.folds > 1 else np.zeros_like(mean)
    best = np.flatnonzero(mean == mean.min())
    chosen = float(plan.grid[best[-1]])
    return CvResult(chosen, plan.grid, mean, std, errors, folds, plan.method)


def select_lambda(problem, method, sigma_hat, folds=DEFAULT_FOLDS, grid_c=DEFAULT_GRID_C, seed=0) -> CvResult:
    """Cross-validate ``method`` on :func:`default_grid` and return the result."""
    grid = default_grid(problem, sigma_hat, grid_c, method=method)
    return cross_validate(problem, CvPlan(grid, method, folds, None, seed))
