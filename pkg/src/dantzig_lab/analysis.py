"""Variable screening and importance under collinearity.

The running example is three predictors with ``X2 = alpha X1 + beta X3``
(``X1``, ``X3`` independent, unit variance) and ``Y = X1 + X2 + X3``.  Three
two-variable supports reproduce ``Y`` exactly::

    {X1, X3}:  (1 + alpha,        1 + beta)
    {X1, X2}:  (1 - alpha / beta, 1 + 1 / beta)
    {X2, X3}:  (1 + 1 / alpha,    1 - beta / alpha)

Taking the other variable's share out of ``X2`` gives
``Y = (1 + 1/alpha)(X2 - beta X3) + (alpha + 1) X3`` for the last support;
the coefficient on the final term multiplies ``X3`` (not ``X1``), which the
least-squares check in the tests confirms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .conditions import DEFAULT_BUDGET
from .errors import BudgetExceededError, DegenerateCoefficientError, RankDeficientError
from .estimators import FitResult
from .problem import CoefficientVector, RegressionProblem, least_squares

CUTOFFS = ("standardized", "per-observation")
DEFAULT_R2_THRESHOLD = 0.99
REPRESENTATION_RTOL = 1e-8


def screen_statistics(problem: RegressionProblem, sigma_hat) -> np.ndarray:
    """``|X_k^T Y| / sqrt(n sigma_hat^2)`` for every column."""
    if sigma_hat <= 0:
        raise ValueError("sigma_hat must be positive")
    x, y = problem.design, problem.response
    return np.abs(x.T @ y) / math.sqrt(problem.n * sigma_hat**2)


def screen_cutoff(n, p, cutoff="standardized") -> float:
    """``sqrt(2 log p)`` on the N(0, 1) scale, or ``sqrt(2 log p / n)`` (``per-observation``)."""
    if cutoff == "standardized":
        return math.sqrt(2.0 * math.log(p))
    if cutoff == "per-observation":
        return math.sqrt(2.0 * math.log(p) / n)
    raise ValueError(f"unknown cutoff {cutoff!r}")


def screen(problem: RegressionProblem, sigma_hat, cutoff="standardized") -> list[int]:
    """Indices whose standardized marginal statistic exceeds the cutoff."""
    stats = screen_statistics(problem, sigma_hat)
    return [int(k) for k in np.flatnonzero(stats > screen_cutoff(problem.n, problem.p, cutoff))]


# -------------------------------------------------------- representations


@dataclass(frozen=True)
class Representation:
    support: tuple[int, ...]
    coefficients: np.ndarray

    def full(self, p) -> np.ndarray:
        beta = np.zeros(p)
        beta[list(self.support)] = self.coefficients
        return beta

    @property
    def l1(self) -> float:
        return float(np.sum(np.abs(self.coefficients)))


@dataclass(frozen=True)
class RepresentationFamily:
    members: tuple[Representation, ...]
    target: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def by_support(self) -> dict:
        return {m.support: m.coefficients for m in self.members}

    def min_l1(self) -> Representation:
        return min(self.members, key=lambda m: (m.l1, m.support))


def representation_family(problem: RegressionProblem, beta0, max_support, budget=DEFAULT_BUDGET) -> RepresentationFamily:
    """All minimal supports of size ``<= max_support`` whose span contains ``X beta0``.

    A support qualifies when ``X_L`` has full column rank and the
    least-squares residual of ``X beta0`` on it is at most ``1e-8 |X beta0|``.
    Supports containing a smaller qualifying support are skipped, so each
    member is a distinct minimal representation.
    """
    values = beta0.values if isinstance(beta0, CoefficientVector) else np.asarray(beta0, dtype=float)
    p = problem.p
    target = problem.design @ values
    scale = float(np.linalg.norm(target))
    count = sum(math.comb(p, k) for k in range(1, max_support + 1))
    if count > budget:
        raise BudgetExceededError(count, budget)
    found: list[Representation] = []
    for k in range(1, max_support + 1):
        for subset in combinations(range(p), k):
            if any(set(m.support) <= set(subset) for m in found):
                continue
            try:
                ls = least_squares(problem, subset, response=target)
            except RankDeficientError:
                continue
            if np.linalg.norm(ls.residual) <= REPRESENTATION_RTOL * max(scale, 1e-300):
                found.append(Representation(tuple(subset), ls.coefficients))
    return RepresentationFamily(tuple(found), target)


def collinear_representations(alpha, beta) -> dict:
    """Closed-form coefficients of the three two-variable representations (0-based supports)."""
    if alpha == 0 or beta == 0:
        raise DegenerateCoefficientError("alpha and beta must be nonzero")
    return {
        (0, 1): np.array([1 - alpha / beta, 1 + 1 / beta]),
        (0, 2): np.array([1 + alpha, 1 + beta]),
        (1, 2): np.array([1 + 1 / alpha, 1 - beta / alpha]),
    }


# ------------------------------------------------------------- importance


def sn2(alpha, beta, which) -> float:
    """Squared signal-to-noise of ``X2`` once the other variable's share is removed.

    ``which="given_1"``: ``(1 + 1/beta)^2 beta^2 = (beta + 1)^2``;
    ``which="given_3"``: ``(alpha + 1)^2``.
    """
    if which == "given_1":
        if beta == 0:
            raise DegenerateCoefficientError("SN^2(2|1) needs beta != 0")
        return (1.0 + 1.0 / beta) ** 2 * beta**2
    if which == "given_3":
        if alpha == 0:
            raise DegenerateCoefficientError("SN^2(2|3) needs alpha != 0")
        return (1.0 + 1.0 / alpha) ** 2 * alpha**2
    raise ValueError(f"unknown context {which!r}")


def importance_exact(alpha, beta, sigma=0.0) -> float:
    """``max(SN^2(2|1), SN^2(2|3))``, divided by ``sigma^2`` when ``sigma > 0``."""
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    best = max(sn2(alpha, beta, "given_1"), sn2(alpha, beta, "given_3"))
    return best / sigma / sigma if sigma > 0 else best


def t_statistic(problem: RegressionProblem, j, context, response=None) -> float:
    """t statistic of column ``j`` in the least-squares fit on ``{j} + context``."""
    cols = [int(j)] + [int(c) for c in context if int(c) != int(j)]
    if problem.n <= len(cols):
        raise RankDeficientError(cols, "no residual degrees of freedom")
    ls = least_squares(problem, cols, response=response)
    se = math.sqrt(ls.residual_mean_square * ls.inverse_gram_diag[0])
    if se == 0.0:
        return math.copysign(math.inf, ls.coefficients[0]) if ls.coefficients[0] else 0.0
    return float(ls.coefficients[0] / se)


def importance_tstat(problem: RegressionProblem, j, contexts):
    """Largest squared t statistic of ``X_j`` across the given contexts.

    Returns ``(importance, [(context, t^2), ...])``.  Raises
    :class:`RankDeficientError` if some ``{j} + context`` is rank deficient.
    """
    records = []
    for ctx in contexts:
        ctx = tuple(int(c) for c in ctx)
        t = t_statistic(problem, j, ctx)
        records.append((ctx, t * t))
    if not records:
        raise ValueError("at least one context is required")
    return max(t2 for _, t2 in records), records


@dataclass
class VariableRecord:
    index: int
    screen_statistic: float
    importance: float | None = None
    best_context: tuple | None = None
    t_statistics: list = field(default_factory=list)  # (context, t^2)
    r2: list = field(default_factory=list)  # (context, R^2)
    skipped: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "screen_statistic": self.screen_statistic,
            "importance": self.importance,
            "best_context": None if self.best_context is None else list(self.best_context),
            "t_statistics": [{"context": list(c), "t2": v} for c, v in self.t_statistics],
            "r2": [{"context": list(c), "r2": v} for c, v in self.r2],
            "skipped_contexts": [list(c) for c in self.skipped],
        }


@dataclass
class ImportanceReport:
    screened_in: list
    retained: list
    candidates: list
    fit_support: list
    variables: dict
    sigma_hat: float
    params: dict

    def to_dict(self) -> dict:
        return {
            "screened_in": list(self.screened_in),
            "retained": list(self.retained),
            "candidates": list(self.candidates),
            "fit_support": list(self.fit_support),
            "sigma_hat": self.sigma_hat,
            "params": self.params,
            "variables": [self.variables[k].to_dict() for k in sorted(self.variables)],
        }


def _r2(target, residual):
    tss = float(target @ target)
    return 1.0 - float(residual @ residual) / tss if tss > 0 else 0.0


def candidate_importance_procedure(problem: RegressionProblem, fit: FitResult, K,
                                   fit_r2_threshold=DEFAULT_R2_THRESHOLD, sigma_hat=None) -> ImportanceReport:
    """Look for alternatives to the variables chosen by a sparse fit.

    1. Take the ``K`` columns with the largest ``|X_k^T Y|``.
    2. For each candidate ``c`` and each ``j`` in the fit's support, regress
       the fitted vector ``X b`` on ``{c}`` plus the support without ``j``.
    3. Record the (uncentred) R^2 of that regression and the squared t
       statistic of ``c`` for ``Y`` in the same context.
    4. Keep candidates for which some context has ``R^2 >= fit_r2_threshold``
       and ``t^2 >= 2 log p``.

    Rank-deficient contexts are recorded under ``skipped`` and ignored.
    ``sigma_hat`` (for the reported screening statistics) defaults to the
    residual RMS of the fit.
    """
    support = list(fit.support)
    if not support:
        raise ValueError("the fit has an empty support")
    if K < 0:
        raise ValueError("K must be nonnegative")
    n, p = problem.n, problem.p
    x, y = problem.design, problem.response
    fitted = x @ fit.beta
    if sigma_hat is None:
        resid = y - fitted
        sigma_hat = math.sqrt(float(resid @ resid) / max(n - len(support), 1))
    stats = screen_statistics(problem, sigma_hat) if sigma_hat > 0 else np.full(p, np.inf)
    corr = np.abs(x.T @ y)
    candidates = sorted(int(k) for k in np.argsort(-corr, kind="stable")[:K])
    t2_floor = 2.0 * math.log(p)

    variables = {}
    retained = []
    for c in candidates:
        rec = VariableRecord(c, float(stats[c]))
        keep = False
        best = None
        for j in support:
            ctx = tuple(k for k in support if k != j and k != c)
            cols = [c, *ctx]
            try:
                ls = least_squares(problem, cols, response=fitted)
                t = t_statistic(problem, c, ctx)
            except RankDeficientError:
                rec.skipped.append(ctx)
                continue
            r2 = _r2(fitted, ls.residual)
            t2 = t * t
            rec.r2.append((ctx, r2))
            rec.t_statistics.append((ctx, t2))
            if best is None or t2 > best[1]:
                best = (ctx, t2)
            if r2 >= fit_r2_threshold and t2 >= t2_floor:
                keep = True
        if best is not None:
            rec.best_context, rec.importance = best[0], best[1]
        variables[c] = rec
        if keep:
            retained.append(c)
    for j in support:
        variables.setdefault(j, VariableRecord(j, float(stats[j])))
    screened = sorted(variables)
    return ImportanceReport(
        screened, retained, candidates, support, variables, float(sigma_hat),
        {"K": int(K), "r2_threshold": float(fit_r2_threshold), "t2_threshold": t2_floor},
    )
