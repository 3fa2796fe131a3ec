"""Regression problem data model, column normalization and synthetic designs.

Conventions
-----------
* Column indices are 0-based everywhere in the Python API and in JSON output.
* The model is ``Y = X beta + eps`` with the columns of ``X`` scaled so that
  ``|X_j|^2 = n``.  All Gram matrices are reported on the unit-diagonal scale
  ``X^T X / n``; for a design that is not normalized, :func:`gram` applies the
  same column rescaling first, so the condition thresholds (``1/32``, ``< 1``,
  ``< 2``) keep their meaning.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    IndexOutOfRangeError,
    InvalidSpecError,
    RankDeficientError,
    ZeroColumnError,
)

SUPPORT_TOL = 1e-8
NORMALIZATION_RTOL = 1e-9
RANK_RTOL = 1e-10

DESIGN_KINDS = ("iid-gaussian", "collinear-example", "custom-correlation", "orthogonal")


def _frozen(a):
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class RegressionProblem:
    """Design matrix, response and (optionally) the known noise level."""

    design: np.ndarray
    response: np.ndarray
    noise_sigma: float | None = None
    normalized: bool = False
    column_scales: np.ndarray | None = None

    def __post_init__(self):
        x = np.asarray(self.design, dtype=float)
        y = np.asarray(self.response, dtype=float).reshape(-1)
        if x.ndim != 2:
            raise ValueError("design must be a 2-d array")
        n, p = x.shape
        if n < 1 or p < 1:
            raise ValueError("design must have at least one row and one column")
        if y.shape[0] != n:
            raise ValueError(f"response has length {y.shape[0]}, design has {n} rows")
        if self.noise_sigma is not None and self.noise_sigma < 0:
            raise ValueError("noise_sigma must be nonnegative")
        object.__setattr__(self, "design", _frozen(x))
        object.__setattr__(self, "response", _frozen(y))
        if self.column_scales is not None:
            object.__setattr__(self, "column_scales", _frozen(self.column_scales))
        if self.normalized:
            sq = np.sum(x * x, axis=0)
            if np.max(np.abs(sq - n)) > NORMALIZATION_RTOL * n:
                raise ValueError("normalized problem must satisfy |X_j|^2 = n")

    @property
    def n(self) -> int:
        return self.design.shape[0]

    @property
    def p(self) -> int:
        return self.design.shape[1]

    def with_response(self, response, noise_sigma=None):
        return RegressionProblem(
            self.design, response, noise_sigma, self.normalized, self.column_scales
        )

    def subset_rows(self, rows):
        """Problem restricted to the given observations (normalization flag dropped)."""
        rows = np.asarray(rows, dtype=int)
        return RegressionProblem(self.design[rows], self.response[rows], self.noise_sigma)


@dataclass(frozen=True)
class CoefficientVector:
    values: np.ndarray
    support_tolerance: float = SUPPORT_TOL

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(np.asarray(self.values).reshape(-1)))

    @property
    def support(self) -> list[int]:
        return [int(j) for j in np.flatnonzero(np.abs(self.values) > self.support_tolerance)]

    @property
    def sparsity(self) -> int:
        return len(self.support)

    @property
    def l1(self) -> float:
        return float(np.sum(np.abs(self.values)))

    def __len__(self):
        return self.values.shape[0]


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for :func:`simulate`.

    ``design_kind`` is one of ``iid-gaussian``, ``collinear-example`` (uses
    ``alpha``/``beta``, forces ``p = 3`` and ``beta0 = (1, 1, 1)`` on the raw
    columns), ``custom-correlation`` (equicorrelated Gaussian rows with
    correlation ``r``) or ``orthogonal`` (``X^T X = n I``, requires ``p <= n``).
    """

    n: int
    p: int
    s: int
    sigma: float = 1.0
    design_kind: str = "iid-gaussian"
    seed: int = 0
    alpha: float = 1.0
    beta: float = 1.0
    r: float = 0.0
    normalize: bool = True

    def validate(self):
        if self.design_kind not in DESIGN_KINDS:
            raise InvalidSpecError(f"unknown design_kind {self.design_kind!r}")
        if self.n < 1 or self.p < 1 or self.s < 0:
            raise InvalidSpecError("n and p must be positive and s nonnegative")
        if self.s > self.p:
            raise InvalidSpecError(f"s={self.s} exceeds p={self.p}")
        if self.sigma < 0:
            raise InvalidSpecError("sigma must be nonnegative")
        if self.design_kind == "collinear-example" and self.p != 3:
            raise InvalidSpecError("collinear-example requires p = 3")
        if self.design_kind == "orthogonal" and self.p > self.n:
            raise InvalidSpecError("orthogonal design requires p <= n")
        if self.design_kind == "custom-correlation" and not (-1.0 / max(self.p - 1, 1) < self.r < 1.0):
            raise InvalidSpecError("equicorrelation r must lie in (-1/(p-1), 1)")


def column_sq_norms(x):
    return np.sum(np.asarray(x) ** 2, axis=0)


def normalize_columns(problem: RegressionProblem) -> RegressionProblem:
    """Rescale every column to ``|X_j|^2 = n``.

    The per-column factors ``sqrt(n) / |X_j|`` are stored in
    ``column_scales`` (multiplied into any scales already recorded), so a
    coefficient ``b`` on the normalized column corresponds to
    ``b * scale_j`` on the original one.
    """
    x = problem.design
    norms = np.sqrt(column_sq_norms(x))
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise ZeroColumnError(int(zero[0]))
    scales = np.sqrt(problem.n) / norms
    xn = x * scales
    # one extra pass removes the last-ulp drift of the division
    xn = xn * (np.sqrt(problem.n) / np.sqrt(column_sq_norms(xn)))
    prior = problem.column_scales if problem.column_scales is not None else 1.0
    return RegressionProblem(xn, problem.response, problem.noise_sigma, True, prior * scales)


def _check_subset(p, subset):
    idx = np.asarray(list(subset) if not isinstance(subset, np.ndarray) else subset, dtype=int).reshape(-1)
    if idx.size == 0:
        raise IndexOutOfRangeError("subset must be nonempty")
    if idx.min() < 0 or idx.max() >= p:
        raise IndexOutOfRangeError(f"subset {idx.tolist()} out of range for p={p}")
    return idx


def unit_gram(design) -> np.ndarray:
    """Full unit-diagonal Gram matrix ``D^{-1/2} X^T X D^{-1/2}``.

    Equals ``X^T X / n`` when ``|X_j|^2 = n`` for every column.
    """
    x = np.asarray(design, dtype=float)
    g = x.T @ x
    d = np.sqrt(np.diag(g))
    zero = np.flatnonzero(d == 0.0)
    if zero.size:
        raise ZeroColumnError(int(zero[0]))
    g = g / np.outer(d, d)
    g = 0.5 * (g + g.T)
    np.fill_diagonal(g, 1.0)
    return g


def gram(problem: RegressionProblem, subset=None) -> np.ndarray:
    """Unit-diagonal Gram block ``X_L^T X_L / n`` for the columns in ``subset``."""
    if subset is None:
        return unit_gram(problem.design)
    idx = _check_subset(problem.p, subset)
    return unit_gram(problem.design[:, idx])


@dataclass(frozen=True)
class LeastSquaresFit:
    coefficients: np.ndarray
    residual: np.ndarray
    residual_mean_square: float
    subset: tuple[int, ...]
    inverse_gram_diag: np.ndarray = field(repr=False)


def least_squares(problem: RegressionProblem, subset, response=None) -> LeastSquaresFit:
    """Ordinary least squares of the response on the columns in ``subset``.

    ``response`` overrides ``problem.response`` (used when regressing fitted
    values).  The residual mean square is ``RSS / (n - |L|)`` and is ``nan``
    when ``n == |L|``.

    Raises
    ------
    RankDeficientError
        If the smallest singular value of ``X_L`` is at most ``1e-10`` times
        the largest.
    """
    idx = _check_subset(problem.p, subset)
    xl = problem.design[:, idx]
    y = problem.response if response is None else np.asarray(response, dtype=float)
    u, sv, vt = np.linalg.svd(xl, full_matrices=False)
    if sv.size < idx.size or sv[-1] <= RANK_RTOL * sv[0]:
        raise RankDeficientError(idx)
    coef = vt.T @ ((u.T @ y) / sv)
    resid = y - xl @ coef
    dof = problem.n - idx.size
    rms = float(resid @ resid / dof) if dof > 0 else float("nan")
    inv_diag = np.sum((vt.T / sv) ** 2, axis=1)
    return LeastSquaresFit(coef, resid, rms, tuple(int(i) for i in idx), inv_diag)


def orthogonal_design(n, p, rng) -> np.ndarray:
    """Random ``n x p`` design with ``X^T X = n I``."""
    if p > n:
        raise InvalidSpecError("orthogonal design requires p <= n")
    q, r = np.linalg.qr(rng.standard_normal((n, p)))
    q = q * np.sign(np.diag(r))
    return np.sqrt(n) * q


def collinear_raw_columns(n, alpha, beta, rng):
    """Raw i.i.d. draws of ``(X1, X2, X3)`` with ``X2 = alpha X1 + beta X3``."""
    x1 = rng.standard_normal(n)
    x3 = rng.standard_normal(n)
    return np.column_stack([x1, alpha * x1 + beta * x3, x3])


def collinear_population(alpha, beta, n=4, sigma=None):
    """Exact population realization of the three-variable collinear example.

    ``X1`` and ``X3`` are orthogonal, mean zero, with ``|X|^2 = n``, so that
    ``X^T X / n`` equals the population covariance of ``(X1, alpha X1 + beta
    X3, X3)`` with no sampling error.  The response is the noiseless
    ``Y = X1 + X2 + X3`` on the raw (unnormalized) columns.  ``n`` must be a
    positive multiple of 4.
    """
    if n < 4 or n % 4:
        raise InvalidSpecError("population design needs n a positive multiple of 4")
    reps = n // 4
    x1 = np.tile([1.0, -1.0, 1.0, -1.0], reps)
    x3 = np.tile([1.0, 1.0, -1.0, -1.0], reps)
    x = np.column_stack([x1, alpha * x1 + beta * x3, x3])
    return RegressionProblem(x, x.sum(axis=1), sigma)


def collinear_population_gram(alpha, beta):
    """Unit-diagonal population Gram of the collinear example."""
    c = np.array([[1.0, alpha, 0.0], [alpha, alpha**2 + beta**2, beta], [0.0, beta, 1.0]])
    d = np.sqrt(np.diag(c))
    return c / np.outer(d, d)


def _equicorrelated(n, p, r, rng):
    z = rng.standard_normal((n, p))
    if r == 0:
        return z
    if r > 0:
        common = rng.standard_normal((n, 1))
        return np.sqrt(1 - r) * z + np.sqrt(r) * common
    # negative equicorrelation via the Cholesky factor
    cov = (1 - r) * np.eye(p) + r * np.ones((p, p))
    return z @ np.linalg.cholesky(cov).T


def simulate(spec: SyntheticSpec):
    """Draw a problem and the true coefficients from ``spec``.

    Returns ``(problem, beta0)``.  The output is a deterministic function of
    ``spec``.  For the ``iid-gaussian``, ``custom-correlation`` and
    ``orthogonal`` kinds, ``beta0`` has ``s`` entries equal to ``+-1`` with
    independent signs on a uniformly random support.  For the collinear
    example ``Y = X1 + X2 + X3`` is formed on the raw columns; when the
    design is then normalized, ``beta0`` is rescaled so that ``Y = X beta0 +
    eps`` still holds exactly.
    """
    spec.validate()
    rng = np.random.default_rng(np.random.SeedSequence(spec.seed))
    n, p = spec.n, spec.p
    if spec.design_kind == "collinear-example":
        x = collinear_raw_columns(n, spec.alpha, spec.beta, rng)
        beta0 = np.ones(3)
    else:
        if spec.design_kind == "iid-gaussian":
            x = rng.standard_normal((n, p))
        elif spec.design_kind == "custom-correlation":
            x = _equicorrelated(n, p, spec.r, rng)
        else:
            x = orthogonal_design(n, p, rng)
        if spec.normalize:
            x = x * (np.sqrt(n) / np.sqrt(column_sq_norms(x)))
        beta0 = np.zeros(p)
        support = np.sort(rng.choice(p, size=spec.s, replace=False))
        beta0[support] = rng.choice([-1.0, 1.0], size=spec.s)
    noise = spec.sigma * rng.standard_normal(n)
    problem = RegressionProblem(x, x @ beta0 + noise, spec.sigma)
    if spec.normalize:
        problem = normalize_columns(problem)
        if spec.design_kind == "collinear-example":
            beta0 = beta0 / problem.column_scales
        problem = RegressionProblem(
            problem.design, problem.design @ beta0 + noise, spec.sigma, True, problem.column_scales
        )
    return problem, CoefficientVector(beta0)


# ---------------------------------------------------------------- CSV I/O


def read_design_csv(path) -> np.ndarray:
    x = np.loadtxt(path, delimiter=",", ndmin=2, dtype=float)
    return x


def read_response_csv(path) -> np.ndarray:
    y = np.loadtxt(path, delimiter=",", ndmin=1, dtype=float)
    return y.reshape(-1)


def write_problem(problem: RegressionProblem, directory, seed=None, beta0=None, extra=None):
    """Write ``design.csv``, ``response.csv`` and a ``meta.json`` sidecar.

    Returns the metadata dictionary that was written.
    """
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    np.savetxt(out / "design.csv", problem.design, delimiter=",", fmt="%.17g")
    np.savetxt(out / "response.csv", problem.response.reshape(-1, 1), delimiter=",", fmt="%.17g")
    meta = {
        "n": problem.n,
        "p": problem.p,
        "seed": seed,
        "normalized": bool(problem.normalized),
        "noise_sigma": problem.noise_sigma,
        "column_scales": None if problem.column_scales is None else problem.column_scales.tolist(),
    }
    if beta0 is not None:
        values = beta0.values if isinstance(beta0, CoefficientVector) else np.asarray(beta0)
        np.savetxt(out / "beta0.csv", values.reshape(-1, 1), delimiter=",", fmt="%.17g")
        meta["beta0"] = values.tolist()
    if extra:
        meta.update(extra)
    with open(out / "meta.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return meta


def load_problem(design_path, response_path=None, normalize=False, noise_sigma=None):
    x = read_design_csv(design_path)
    y = read_response_csv(response_path) if response_path is not None else np.zeros(x.shape[0])
    problem = RegressionProblem(x, y, noise_sigma)
    return normalize_columns(problem) if normalize else problem


def is_normalized(problem: RegressionProblem) -> bool:
    sq = column_sq_norms(problem.design)
    return bool(np.max(np.abs(sq - problem.n)) <= NORMALIZATION_RTOL * problem.n)
