"""Seeded Monte-Carlo experiments.

Replication ``r`` of every cell uses seed ``seed + r``, so cells share
their random draws (common random numbers) and results do not depend on
whether replications run serially or in a process pool.  The pool size is
read from ``DANTZIG_LAB_NUM_WORKERS`` (default 1).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DantzigLabError
from .estimators import chebyshev_fit, dantzig_fit, lambda_default, lasso_fit
from .problem import RegressionProblem, SyntheticSpec, simulate

WORKERS_ENV = "DANTZIG_LAB_NUM_WORKERS"


def _workers():
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def _map(fn, items):
    workers = _workers()
    if workers == 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ------------------------------------------------------------- rate study


@dataclass(frozen=True)
class Cell:
    n: int
    p: int
    s: int
    sigma: float
    design_kind: str = "iid-gaussian"


@dataclass(frozen=True)
class ExperimentConfig:
    cells: tuple
    replications: int = 50
    seed: int = 0
    estimators: tuple = ("dantzig", "lasso")
    lambda_scale: float = 1.0

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        cells = tuple(c if isinstance(c, Cell) else Cell(**c) for c in self.cells)
        for c in cells:
            if c.s > c.p:
                raise ValueError(f"cell {c} has s > p")
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "estimators", tuple(self.estimators))

    @classmethod
    def rate_grid(cls, n_values=(200, 400, 800, 1600), p_factor=2, s=5, sigma=1.0, **kw):
        cells = tuple(Cell(n, p_factor * n, s, sigma) for n in n_values)
        return cls(cells, **kw)


def rate_predictor(n, p, s) -> float:
    return math.sqrt(s / n * math.log(p))


def _rate_replication(args):
    cell, rep, seed, estimators, lambda_scale = args
    spec = SyntheticSpec(cell.n, cell.p, cell.s, cell.sigma, cell.design_kind, seed + rep)
    problem, beta0 = simulate(spec)
    lam = lambda_scale * lambda_default(cell.n, cell.p, cell.sigma)
    out = []
    for est in estimators:
        rec = {"n": cell.n, "p": cell.p, "s": cell.s, "sigma": cell.sigma,
               "replication": rep, "estimator": est, "lambda": None, "error": None, "failure": None}
        try:
            if est == "dantzig":
                res = dantzig_fit(problem, lam)
            elif est == "lasso":
                res = lasso_fit(problem, 2.0 * lam)
            else:
                raise ValueError(f"unknown estimator {est!r}")
            rec["lambda"] = res.lam
            rec["error"] = float(np.linalg.norm(res.beta - beta0.values))
        except DantzigLabError as exc:
            rec["failure"] = f"{type(exc).__name__}: {exc}"
        out.append(rec)
    return out


@dataclass
class RateStudyResult:
    records: list
    summary: list
    slopes: dict
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"config": self.config, "slopes": self.slopes, "summary": self.summary, "records": self.records}


def _loglog_slope(x, y):
    lx, ly = np.log(np.asarray(x)), np.log(np.asarray(y))
    if lx.size < 2 or np.ptp(lx) == 0:
        return None
    return float(np.polyfit(lx, ly, 1)[0])


def run_rate_study(config: ExperimentConfig) -> RateStudyResult:
    """Error ``|b_hat - b0|_2`` against ``sqrt((s/n) log p)`` across cells.

    The Dantzig bound is ``lambda_scale * sigma sqrt(2 n log p)`` with the
    true ``sigma``; the Lasso penalty is twice that.  Per-cell means and
    medians are reported and the log-log slope is fitted by least squares on
    the cell means.  Failed fits are recorded with their error message.
    """
    jobs = [(cell, rep, config.seed, config.estimators, config.lambda_scale)
            for cell in config.cells for rep in range(config.replications)]
    records = [r for batch in _map(_rate_replication, jobs) for r in batch]
    summary = []
    slopes = {}
    for est in config.estimators:
        xs, ys = [], []
        for cell in config.cells:
            errs = [r["error"] for r in records
                    if r["estimator"] == est and r["error"] is not None
                    and (r["n"], r["p"], r["s"], r["sigma"]) == (cell.n, cell.p, cell.s, cell.sigma)]
            pred = rate_predictor(cell.n, cell.p, cell.s)
            row = {"estimator": est, "n": cell.n, "p": cell.p, "s": cell.s, "sigma": cell.sigma,
                   "predictor": pred, "count": len(errs),
                   "mean_error": float(np.mean(errs)) if errs else None,
                   "median_error": float(np.median(errs)) if errs else None}
            summary.append(row)
            if errs:
                xs.append(pred)
                ys.append(row["mean_error"])
        slopes[est] = _loglog_slope(xs, ys) if len(xs) >= 2 else None
    cfg = {"cells": [asdict(c) for c in config.cells], "replications": config.replications,
           "seed": config.seed, "estimators": list(config.estimators), "lambda_scale": config.lambda_scale}
    return RateStudyResult(records, summary, slopes, cfg)


# --------------------------------------------------- objective comparison


@dataclass(frozen=True)
class ComparisonConfig:
    """Cosine-dictionary family for the sup-norm versus Dantzig comparison.

    ``x ~ U(0, 1)``, dictionary ``f_j(x) = sqrt(2) cos(pi j x)`` for
    ``j = 1..p``, regression function ``f = sum_{j<=n_terms} b_j f_j`` with
    ``b_j = +-1``.  Residuals are ``N(0, sigma^2)`` plus, with probability
    ``spike_prob``, a spike of size ``+-spike_scale * sigma``.  With
    ``outlier`` set, the response of the first observation is additionally
    shifted by ``outlier * sigma`` and both fits are repeated.
    """

    n: int = 200
    p: int = 20
    n_terms: int = 5
    sigma: float = 1.0
    spike_prob: float = 0.01
    spike_scale: float = 20.0
    replications: int = 50
    seed: int = 0
    n_test: int = 2000
    outlier: float | None = None


def cosine_dictionary(x, p) -> np.ndarray:
    j = np.arange(1, p + 1)
    return math.sqrt(2.0) * np.cos(np.pi * np.outer(x, j))


def _comparison_replication(args):
    cfg, rep = args
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed + rep))
    coef = np.zeros(cfg.p)
    coef[: cfg.n_terms] = rng.choice([-1.0, 1.0], size=cfg.n_terms)
    x = rng.uniform(size=cfg.n)
    raw = cosine_dictionary(x, cfg.p)
    f = raw @ coef
    noise = cfg.sigma * rng.standard_normal(cfg.n)
    spikes = rng.uniform(size=cfg.n) < cfg.spike_prob
    noise = noise + spikes * rng.choice([-1.0, 1.0], size=cfg.n) * cfg.spike_scale * cfg.sigma
    x_test = rng.uniform(size=cfg.n_test)
    raw_test = cosine_dictionary(x_test, cfg.p)
    f_test = raw_test @ coef

    scales = math.sqrt(cfg.n) / np.linalg.norm(raw, axis=0)
    design = raw * scales
    lam = lambda_default(cfg.n, cfg.p, cfg.sigma)

    def evaluate(y):
        problem = RegressionProblem(design, y, cfg.sigma)
        out = {}
        for name, fitter in (("dantzig", lambda: dantzig_fit(problem, lam)), ("chebyshev", lambda: chebyshev_fit(problem))):
            b = fitter().beta * scales  # back to the raw dictionary scale
            out[f"{name}_mse"] = float(np.mean((raw_test @ b - f_test) ** 2))
            out[f"{name}_coef_error"] = float(np.linalg.norm(b - coef))
        return out

    y = f + noise
    rec = {"replication": rep, "spikes": int(spikes.sum()), **evaluate(y)}
    if cfg.outlier is not None:
        y_out = y.copy()
        y_out[0] += cfg.outlier * cfg.sigma
        rec.update({f"outlier_{k}": v for k, v in evaluate(y_out).items()})
    return rec


def run_objective_comparison(config: ComparisonConfig) -> dict:
    """Out-of-sample error of the Chebyshev and Dantzig fits on fresh draws.

    Prediction error is measured against the regression function on
    ``n_test`` fresh inputs.  The table reports each replication and the
    fraction of replications in which the Dantzig fit has the smaller error.
    """
    rows = _map(_comparison_replication, [(config, r) for r in range(config.replications)])
    wins = [r["dantzig_mse"] <= r["chebyshev_mse"] for r in rows]
    summary = {
        "dantzig_win_rate": float(np.mean(wins)),
        "mean_dantzig_mse": float(np.mean([r["dantzig_mse"] for r in rows])),
        "mean_chebyshev_mse": float(np.mean([r["chebyshev_mse"] for r in rows])),
    }
    if config.outlier is not None:
        for name in ("dantzig", "chebyshev"):
            before = np.mean([r[f"{name}_coef_error"] for r in rows])
            after = np.mean([r[f"outlier_{name}_coef_error"] for r in rows])
            summary[f"{name}_outlier_error_ratio"] = float(after / before)
    return {"config": asdict(config), "summary": summary, "replications": rows}
