"""Cross-validated tuning and two small seeded experiments.

Run with ``python3 demos/tuning_and_experiments.py``.  Set
``DANTZIG_LAB_NUM_WORKERS`` to run replications in parallel.
"""

from dantzig_lab import (
    ComparisonConfig,
    ExperimentConfig,
    SyntheticSpec,
    estimate_sigma,
    lambda_default,
    run_objective_comparison,
    run_rate_study,
    select_lambda,
    simulate,
)

problem, beta0 = simulate(SyntheticSpec(n=100, p=50, s=4, sigma=1.0, seed=5))
sigma_hat = estimate_sigma(problem, seed=0)
cv = select_lambda(problem, "dantzig", sigma_hat, seed=0)
print(f"sigma_hat {sigma_hat:.3f}")
print(f"cv choice {cv.chosen_lambda:.3f}, default bound {lambda_default(100, 50, sigma_hat):.3f}")
for lam, err in zip(cv.lambdas[::4], cv.mean_error[::4]):
    print(f"  lambda {lam:7.3f}  held-out error {err:.4f}")

# Error against sqrt((s/n) log p) on a short grid; the slope should be near one.
study = run_rate_study(ExperimentConfig.rate_grid((100, 200, 400), replications=5, seed=0))
for row in study.summary:
    print(f"{row['estimator']:8s} n={row['n']:4d}  mean error {row['mean_error']:.3f}  predictor {row['predictor']:.3f}")
print("log-log slopes:", {k: round(v, 3) for k, v in study.slopes.items()})

# Sup-norm residual fit against the Dantzig selector on a cosine dictionary.
out = run_objective_comparison(ComparisonConfig(replications=10, seed=0))
print("objective comparison:", {k: round(v, 3) for k, v in out["summary"].items()})
