"""Dantzig selector, Lasso and soft thresholding on a few small problems.

Run with ``python3 demos/fit_and_compare.py``.
"""

import numpy as np

from dantzig_lab import (
    RegressionProblem,
    SyntheticSpec,
    collinear_population,
    dantzig_fit,
    lambda_default,
    lasso_fit,
    simulate,
    soft_threshold_fit,
)

# Orthogonal design: the three estimators coincide (Lasso uses twice the bound).
problem, beta0 = simulate(SyntheticSpec(n=64, p=16, s=3, sigma=0.5, design_kind="orthogonal", seed=1))
lam = lambda_default(problem.n, problem.p, 0.5)
ds = dantzig_fit(problem, lam)
la = lasso_fit(problem, 2 * lam)
st = soft_threshold_fit(problem, lam)
print("orthogonal design, lambda =", round(lam, 3))
print("  true support     ", beta0.support)
print("  dantzig support  ", ds.support)
print("  max |ds - lasso| ", np.max(np.abs(ds.beta - la.beta)))
print("  max |ds - soft|  ", np.max(np.abs(ds.beta - st.beta)))

# Collinear example X2 = X1 + X3 with alpha = beta = 1 and Y = X1 + X2 + X3 = 2 X2.
# As the bound shrinks both fits pick the representation with the smallest l1 norm.
pop = collinear_population(1.0, 1.0, n=8)
for frac in (0.5, 0.1, 1e-6):
    top = float(np.max(np.abs(pop.design.T @ pop.response)))
    d = dantzig_fit(pop, frac * top).beta
    l = lasso_fit(pop, 2 * frac * top).beta
    print(f"collinear, bound {frac:g} x max|X^T Y|: dantzig {np.round(d, 4)}  lasso {np.round(l, 4)}")

# Wide Gaussian design, p = 2n.
problem, beta0 = simulate(SyntheticSpec(n=100, p=200, s=5, sigma=1.0, seed=3))
lam = lambda_default(100, 200, 1.0)
for name, res in (("dantzig", dantzig_fit(problem, lam)), ("lasso", lasso_fit(problem, 2 * lam))):
    err = np.linalg.norm(res.beta - beta0.values)
    print(f"p = 2n, {name:8s} error {err:.3f}  support {res.support}")
print("true support", beta0.support)

# A raw problem can be built straight from arrays.
rng = np.random.default_rng(0)
x = rng.standard_normal((30, 4))
y = x @ np.array([2.0, 0.0, -1.0, 0.0]) + 0.1 * rng.standard_normal(30)
print("raw arrays:", np.round(dantzig_fit(RegressionProblem(x, y), 1.0).beta, 3))
