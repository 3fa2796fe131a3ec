import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dantzig_lab.errors import IndexOutOfRangeError, InvalidSpecError, RankDeficientError, ZeroColumnError
from dantzig_lab.problem import (
    CoefficientVector,
    RegressionProblem,
    SyntheticSpec,
    collinear_population,
    collinear_population_gram,
    collinear_raw_columns,
    gram,
    least_squares,
    load_problem,
    normalize_columns,
    simulate,
    write_problem,
)


def test_normalize_examples():
    x = np.array([[1.0, 2.0, 1.0], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
    out = normalize_columns(RegressionProblem(x, np.zeros(4)))
    np.testing.assert_allclose(out.design[:, 0], [1, 1, 1, 1])
    np.testing.assert_allclose(out.design[:, 1], [2, 0, 0, 0])
    np.testing.assert_allclose(out.design[:, 2], [2, 0, 0, 0])
    np.testing.assert_allclose(out.column_scales, [1.0, 1.0, 2.0])
    assert out.normalized


def test_normalize_zero_column():
    x = np.array([[1.0, 0.0], [2.0, 0.0]])
    with pytest.raises(ZeroColumnError) as exc:
        normalize_columns(RegressionProblem(x, np.zeros(2)))
    assert exc.value.column == 1


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 30), st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_normalize_invariant(n, p, seed):
    x = np.random.default_rng(seed).standard_normal((n, p)) * 10.0 ** np.arange(-3, p - 3)
    out = normalize_columns(RegressionProblem(x, np.zeros(n)))
    assert np.max(np.abs(np.sum(out.design**2, axis=0) - n)) / n <= 1e-9
    np.testing.assert_allclose(np.diag(gram(out)), 1.0, atol=1e-9)


def test_problem_shape_checks():
    with pytest.raises(ValueError):
        RegressionProblem(np.ones((3, 2)), np.ones(4))
    with pytest.raises(ValueError):
        RegressionProblem(np.ones((3, 2)), np.ones(3), noise_sigma=-1.0)


def test_problem_is_immutable():
    prob = RegressionProblem(np.ones((2, 1)), np.ones(2))
    with pytest.raises(ValueError):
        prob.design[0, 0] = 5.0


def test_coefficient_vector_support():
    b = CoefficientVector([0.0, 1e-9, -2.0, 3e-8])
    assert b.support == [2, 3]
    assert b.sparsity == 2
    assert b.l1 == pytest.approx(2.0 + 1e-9 + 3e-8)


def test_gram_orthogonal_is_identity(orthogonal_problem):
    np.testing.assert_allclose(gram(orthogonal_problem, [0, 3, 7]), np.eye(3), atol=1e-12)


def test_gram_two_columns_with_correlation(rng):
    z = rng.standard_normal((50, 2))
    z -= z.mean(axis=0)
    r = np.corrcoef(z.T)[0, 1]
    g = gram(normalize_columns(RegressionProblem(z, np.zeros(50))))
    np.testing.assert_allclose(g, [[1, r], [r, 1]], atol=1e-12)


def test_gram_subset_range():
    prob = RegressionProblem(np.eye(3), np.zeros(3))
    with pytest.raises(IndexOutOfRangeError):
        gram(prob, [0, 3])
    with pytest.raises(IndexOutOfRangeError):
        gram(prob, [])


def test_collinear_population_gram():
    s = 1 / np.sqrt(2)
    expected = [[1, s, 0], [s, 1, s], [0, s, 1]]
    np.testing.assert_allclose(collinear_population_gram(1.0, 1.0), expected, atol=1e-15)
    np.testing.assert_allclose(gram(collinear_population(1.0, 1.0, n=8)), expected, atol=1e-15)


def test_collinear_gram_empirical():
    prob, _ = simulate(SyntheticSpec(100_000, 3, 3, 0.0, "collinear-example", seed=3))
    np.testing.assert_allclose(gram(prob), collinear_population_gram(1.0, 1.0), atol=2e-2)


def test_least_squares_examples():
    x = np.array([[1.0], [2.0], [3.0]])
    fit = least_squares(RegressionProblem(x, 2 * x[:, 0]), [0])
    assert fit.coefficients[0] == pytest.approx(2.0)
    assert np.abs(fit.residual).max() < 1e-12
    pop = collinear_population(1.0, 2.0, n=8)
    fit = least_squares(pop, [0, 2])
    np.testing.assert_allclose(fit.coefficients, [2.0, 3.0], atol=1e-12)
    assert fit.residual_mean_square == pytest.approx(0.0, abs=1e-24)


def test_least_squares_rank_deficient():
    with pytest.raises(RankDeficientError):
        least_squares(collinear_population(1.0, 1.0), [0, 1, 2])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_least_squares_residual_orthogonal(seed, k):
    rng = np.random.default_rng(seed)
    n = 20
    prob = RegressionProblem(rng.standard_normal((n, 6)), rng.standard_normal(n))
    subset = sorted(rng.choice(6, size=k, replace=False))
    fit = least_squares(prob, subset)
    assert np.max(np.abs(prob.design[:, subset].T @ fit.residual)) <= 1e-8 * n
    assert fit.residual_mean_square == pytest.approx(fit.residual @ fit.residual / (n - k))


@pytest.mark.parametrize("kind", ["iid-gaussian", "custom-correlation", "orthogonal"])
def test_simulate_noiseless_and_deterministic(kind):
    spec = SyntheticSpec(40, 10, 3, 0.0, kind, seed=11, r=0.3)
    prob, beta0 = simulate(spec)
    np.testing.assert_array_equal(prob.response, prob.design @ beta0.values)
    assert beta0.sparsity == 3
    assert set(np.abs(beta0.values[beta0.support])) == {1.0}
    again, beta_again = simulate(spec)
    assert prob.design.tobytes() == again.design.tobytes()
    assert prob.response.tobytes() == again.response.tobytes()
    assert beta0.values.tobytes() == beta_again.values.tobytes()
    assert np.max(np.abs(np.sum(prob.design**2, axis=0) - 40)) <= 1e-9 * 40


def test_simulate_orthogonal_is_orthogonal():
    prob, _ = simulate(SyntheticSpec(16, 16, 2, 1.0, "orthogonal", seed=1))
    np.testing.assert_allclose(prob.design.T @ prob.design, 16 * np.eye(16), atol=1e-10)


@pytest.mark.parametrize("alpha, beta", [(1.0, 1.0), (1.0, 2.0), (-0.5, 3.0)])
def test_simulate_collinear_identity(alpha, beta):
    spec = SyntheticSpec(50, 3, 3, 0.0, "collinear-example", seed=5, alpha=alpha, beta=beta)
    prob, beta0 = simulate(spec)
    raw = collinear_raw_columns(50, alpha, beta, np.random.default_rng(np.random.SeedSequence(5)))
    np.testing.assert_allclose(raw[:, 1], alpha * raw[:, 0] + beta * raw[:, 2], atol=1e-12)
    np.testing.assert_allclose(prob.design, raw * prob.column_scales, rtol=1e-12)
    # Y = X1 + X2 + X3 on the raw columns
    np.testing.assert_allclose(prob.response, raw.sum(axis=1), atol=1e-12)
    np.testing.assert_allclose(prob.design @ beta0.values, prob.response, atol=1e-12)


@pytest.mark.parametrize(
    "kw",
    [dict(n=5, p=3, s=4), dict(n=5, p=4, s=1, design_kind="collinear-example"),
     dict(n=3, p=5, s=1, design_kind="orthogonal"), dict(n=5, p=3, s=1, sigma=-1.0),
     dict(n=5, p=3, s=1, design_kind="nope")],
)
def test_invalid_spec(kw):
    with pytest.raises(InvalidSpecError):
        simulate(SyntheticSpec(**kw))


def test_csv_round_trip(tmp_path):
    prob, beta0 = simulate(SyntheticSpec(12, 4, 2, 0.5, seed=9))
    meta = write_problem(prob, tmp_path, seed=9, beta0=beta0)
    loaded = load_problem(tmp_path / "design.csv", tmp_path / "response.csv")
    np.testing.assert_array_equal(loaded.design, prob.design)
    np.testing.assert_array_equal(loaded.response, prob.response)
    on_disk = json.loads((tmp_path / "meta.json").read_text())
    assert on_disk == meta
    assert on_disk["n"] == 12 and on_disk["p"] == 4 and on_disk["seed"] == 9 and on_disk["normalized"]
