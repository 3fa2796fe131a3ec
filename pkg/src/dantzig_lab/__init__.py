"""Dantzig selector and Lasso laboratory.

Sparse regression estimators (Dantzig selector, Lasso, sup-norm fit),
exact small-scale computation of restricted eigenvalue and coherence
conditions, importance analysis for collinear predictors, cross-validated
tuning and seeded simulation experiments.
"""

from .analysis import (
    candidate_importance_procedure,
    collinear_representations,
    importance_exact,
    importance_tstat,
    representation_family,
    screen,
    screen_statistics,
    sn2,
)
from .conditions import ConditionReport, evaluate_conditions, phi_max, phi_min, rho, theta
from .cv import CvPlan, CvResult, cross_validate, default_grid, select_lambda
from .errors import *  # noqa: F401,F403
from .estimators import (
    FitResult,
    chebyshev_fit,
    dantzig_fit,
    estimate_sigma,
    lambda_default,
    lasso_fit,
    soft_threshold,
    soft_threshold_fit,
)
from .experiments import ComparisonConfig, ExperimentConfig, run_objective_comparison, run_rate_study
from .linalg import max_singular_value, sym_eigs
from .lp import LinearProgram, LpResult, lp_solve
from .problem import (
    CoefficientVector,
    RegressionProblem,
    SyntheticSpec,
    collinear_population,
    gram,
    least_squares,
    normalize_columns,
    simulate,
)

__version__ = "0.1.0"
