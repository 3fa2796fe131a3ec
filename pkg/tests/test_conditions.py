from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import normalized_gaussian
from dantzig_lab.conditions import evaluate_conditions, phi_max, phi_min, rho, theta
from dantzig_lab.errors import BudgetExceededError, InvalidArgsError
from dantzig_lab.linalg import max_singular_value, sym_eigs
from dantzig_lab.problem import RegressionProblem, collinear_population, gram, orthogonal_design


# naive oracles: every subset of every size, Jacobi eigenvalues, python loops
def naive_gram(x):
    n, p = x.shape
    g = np.zeros((p, p))
    for i in range(p):
        for j in range(p):
            g[i, j] = sum(x[k, i] * x[k, j] for k in range(n)) / np.sqrt(
                sum(x[k, i] ** 2 for k in range(n)) * sum(x[k, j] ** 2 for k in range(n)))
    return g


def naive_phi(g, m, largest):
    vals = []
    for size in range(1, m + 1):
        for sub in combinations(range(g.shape[0]), size):
            w = sym_eigs(g[np.ix_(sub, sub)])
            vals.append(w[-1] if largest else w[0])
    return max(vals) if largest else min(vals)


def naive_theta(g, m, m_prime):
    p = g.shape[0]
    best = 0.0
    for a in range(1, m_prime + 1):
        for left in combinations(range(p), a):
            rest = [i for i in range(p) if i not in left]
            for b in range(1, m + 1):
                for right in combinations(rest, b):
                    best = max(best, max_singular_value(g[np.ix_(left, right)]))
    return best


def naive_rho(g):
    p = g.shape[0]
    return max(abs(g[i, j]) for i in range(p) for j in range(p) if i != j)


def problem_for(x):
    return RegressionProblem(x, np.zeros(x.shape[0]))


def two_columns(r):
    u = np.array([1.0, -1.0, 1.0, -1.0])
    v = np.array([1.0, 1.0, -1.0, -1.0])
    x = np.column_stack([u, r * u + np.sqrt(1 - r * r) * v])
    return problem_for(x)


@pytest.mark.parametrize("r", [-0.7, 0.0, 0.3, 0.9])
def test_two_column_closed_forms(r):
    prob = two_columns(r)
    assert phi_min(prob, 2) == pytest.approx(1 - abs(r), abs=1e-12)
    assert phi_max(prob, 2) == pytest.approx(1 + abs(r), abs=1e-12)
    assert phi_max(prob, 1) == pytest.approx(1.0)
    assert theta(prob, 1, 1) == pytest.approx(abs(r), abs=1e-12)
    assert rho(prob, 1) == pytest.approx(abs(r), abs=1e-12)


def test_orthogonal_design(rng):
    prob = problem_for(orthogonal_design(12, 8, rng))
    for m in (1, 3, 8):
        assert phi_min(prob, m) == pytest.approx(1.0, abs=1e-12)
        assert phi_max(prob, m) == pytest.approx(1.0, abs=1e-12)
    assert theta(prob, 2, 3) == pytest.approx(0.0, abs=1e-12)
    assert rho(prob, 2) == pytest.approx(0.0, abs=1e-12)
    # exact ties resolve to the lexicographically first subset
    ext = phi_min(np.eye(8), 3, detail=True)
    assert ext.subset == (0, 1, 2)


def test_collinear_population_phi_min():
    assert abs(phi_min(collinear_population(1.0, 1.0), 3)) <= 1e-12


def test_m_above_p_is_capped(rng):
    prob = problem_for(normalized_gaussian(20, 4, rng))
    assert phi_min(prob, 9) == pytest.approx(phi_min(prob, 4))


@pytest.mark.parametrize("seed", range(6))
def test_theta_grid_oracle(seed):
    g = gram(problem_for(normalized_gaussian(15, 6, np.random.default_rng(seed))))
    angles = np.linspace(0, np.pi, 181)
    circle = np.stack([np.cos(angles), np.sin(angles)])
    best = 0.0
    for left in combinations(range(6), 2):
        rest = [i for i in range(6) if i not in left]
        for right in combinations(rest, 2):
            block = g[np.ix_(left, right)]
            vals = np.abs(circle.T @ block @ circle)
            i, j = np.unravel_index(np.argmax(vals), vals.shape)
            # refine around the coarse optimum
            fine_a = angles[i] + np.linspace(-0.02, 0.02, 201)
            fine_b = angles[j] + np.linspace(-0.02, 0.02, 201)
            ca = np.stack([np.cos(fine_a), np.sin(fine_a)])
            cb = np.stack([np.cos(fine_b), np.sin(fine_b)])
            best = max(best, np.abs(ca.T @ block @ cb).max())
    assert theta(g, 2, 2) == pytest.approx(best, abs=1e-3)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(3, 7))
def test_against_naive_oracle(seed, p):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((p + 3, p))
    g = naive_gram(x)
    prob = problem_for(x)
    np.testing.assert_allclose(gram(prob), g, atol=1e-12)
    for m in range(1, p + 1):
        assert phi_min(prob, m) == pytest.approx(naive_phi(g, m, False), abs=1e-10)
        assert phi_max(prob, m) == pytest.approx(naive_phi(g, m, True), abs=1e-10)
    for m in range(1, p):
        for mp in range(1, p - m + 1):
            assert theta(prob, m, mp) == pytest.approx(naive_theta(g, m, mp), abs=1e-10)
    assert rho(prob, 1) == pytest.approx(naive_rho(g), abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(3, 8))
def test_monotonicity_and_bounds(seed, p):
    prob = problem_for(np.random.default_rng(seed).standard_normal((p + 2, p)))
    mins = [phi_min(prob, m) for m in range(1, p + 1)]
    maxs = [phi_max(prob, m) for m in range(1, p + 1)]
    assert mins[0] == pytest.approx(1.0) and maxs[0] == pytest.approx(1.0)
    assert all(b <= a + 1e-12 for a, b in zip(mins, mins[1:]))
    assert all(b >= a - 1e-12 for a, b in zip(maxs, maxs[1:]))
    for m in range(1, p):
        for mp in range(1, p - m):
            t = theta(prob, m, mp)
            assert theta(prob, m + 1, mp) >= t - 1e-12
            assert theta(prob, m, mp + 1) >= t - 1e-12
            assert t <= np.sqrt(maxs[m - 1] * maxs[mp - 1]) + 1e-12
    r = [rho(prob, s) for s in (1, 2, 3) if s < p]
    assert max(r) == min(r)
    assert 0 <= r[0] <= 1


def test_theta_argument_checks(rng):
    prob = problem_for(normalized_gaussian(10, 4, rng))
    with pytest.raises(InvalidArgsError):
        theta(prob, 2, 3)
    with pytest.raises(InvalidArgsError):
        rho(prob, 4)
    with pytest.raises(InvalidArgsError):
        rho(prob, 0)


def test_budget(rng):
    prob = problem_for(normalized_gaussian(30, 20, rng))
    with pytest.raises(BudgetExceededError) as exc:
        phi_min(prob, 10, budget=1000)
    assert exc.value.count == 184756
    report = evaluate_conditions(prob, 4, budget=100)
    assert not report.enumeration_exact
    assert report.verdicts["A2"] is None and report.verdicts["A3_CT"] is None
    assert report.verdicts["A3_BTW"] is not None and report.verdicts["A1"] is not None
    assert "phi_min_8" in report.budget_exceeded


def test_report_orthogonal(rng):
    report = evaluate_conditions(problem_for(orthogonal_design(16, 8, rng)), 2)
    v = report.verdicts
    assert v["A1"] and v["A2"] and v["A3_BTW"] and v["A3_MY"]
    assert v["A3_CT"] is False
    assert any("phi_min(2s) equals 1" in note for note in report.notes)
    assert report.enumeration_exact


def test_report_collinear():
    report = evaluate_conditions(collinear_population(1.0, 1.0), 2)
    assert report.verdicts["A2"] is False
    assert report.phi_min[3] == pytest.approx(0.0, abs=1e-12)


def test_report_btw_fails_for_correlated_pair():
    report = evaluate_conditions(two_columns(0.9), 1)
    assert report.verdicts["A3_BTW"] is False
    assert report.rho_s == pytest.approx(0.9)


def test_report_serializes(rng):
    d = evaluate_conditions(problem_for(normalized_gaussian(20, 6, rng)), 2).to_dict()
    assert set(d["verdicts"]) == {"A1", "A2", "A3_BTW", "A3_MY", "A3_CT"}
    assert d["params"]["M"] == 1 / 32 and d["params"]["epsilon"] == 1e-3
    assert d["counts"]["phi_min_4"] == 15
