"""Restricted eigenvalue diagnostics and importance of collinear predictors.

Run with ``python3 demos/conditions_and_importance.py``.
"""

import numpy as np

from dantzig_lab import (
    SyntheticSpec,
    collinear_population,
    collinear_representations,
    evaluate_conditions,
    importance_exact,
    phi_max,
    phi_min,
    rho,
    simulate,
    theta,
)

# Exact restricted eigenvalues of a small Gaussian design (full enumeration).
problem, _ = simulate(SyntheticSpec(n=40, p=12, s=2, seed=0))
for m in (1, 2, 4):
    print(f"m = {m}: phi_min {phi_min(problem, m):.4f}  phi_max {phi_max(problem, m):.4f}")
print("theta(2, 4) =", round(theta(problem, 2, 4), 4), " rho(2) =", round(rho(problem, 2), 4))

report = evaluate_conditions(problem, s=2)
print("verdicts:", report.verdicts)

# The collinear population has a singular 3x3 Gram, so the conditions on 2s columns fail.
pop = collinear_population(1.0, 1.0, n=8)
print("collinear verdicts:", evaluate_conditions(pop, s=2).verdicts)

# Y = X1 + X2 + X3 with X2 = alpha X1 + beta X3 has three two-variable representations.
alpha, beta = 0.5, 2.0
for support, coef in collinear_representations(alpha, beta).items():
    print(f"support {support}: coefficients {np.round(coef, 4)}")
print("importance of X2 (sigma = 1):", importance_exact(alpha, beta, sigma=1.0))
