import numpy as np
import pytest

from dantzig_lab.experiments import (
    WORKERS_ENV,
    Cell,
    ComparisonConfig,
    ExperimentConfig,
    cosine_dictionary,
    rate_predictor,
    run_objective_comparison,
    run_rate_study,
)


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig((Cell(20, 5, 6, 1.0),))
    with pytest.raises(ValueError):
        ExperimentConfig((Cell(20, 5, 2, 1.0),), replications=0)
    cfg = ExperimentConfig.rate_grid((50, 100), p_factor=3, s=2)
    assert [c.p for c in cfg.cells] == [150, 300]


def test_rate_predictor():
    assert rate_predictor(400, 800, 5) == pytest.approx(np.sqrt(5 / 400 * np.log(800)))


def test_record_count_and_summary():
    cfg = ExperimentConfig.rate_grid((40, 80), s=2, replications=3, seed=5)
    res = run_rate_study(cfg)
    assert len(res.records) == 2 * 3 * 2
    assert all(r["failure"] is None for r in res.records)
    assert {(row["estimator"], row["n"]) for row in res.summary} == {
        ("dantzig", 40), ("dantzig", 80), ("lasso", 40), ("lasso", 80)}
    row = res.summary[0]
    errs = [r["error"] for r in res.records if r["estimator"] == row["estimator"] and r["n"] == row["n"]]
    assert row["mean_error"] == pytest.approx(np.mean(errs))
    assert row["median_error"] == pytest.approx(np.median(errs))


def test_noiseless_orthogonal_exact():
    cells = tuple(Cell(n, n // 2, 3, 0.0, "orthogonal") for n in (32, 64))
    res = run_rate_study(ExperimentConfig(cells, replications=4, seed=1))
    assert max(r["error"] for r in res.records) <= 1e-6


def test_noise_scaling():
    one = run_rate_study(ExperimentConfig((Cell(100, 200, 5, 1.0),), replications=50, seed=3))
    two = run_rate_study(ExperimentConfig((Cell(100, 200, 5, 2.0),), replications=50, seed=3))
    for a, b in zip(one.summary, two.summary):
        assert b["mean_error"] / a["mean_error"] == pytest.approx(2.0, rel=0.15)


def test_workers_do_not_change_results(monkeypatch):
    cfg = ExperimentConfig.rate_grid((30, 60), s=2, replications=2, seed=8)
    serial = run_rate_study(cfg).to_dict()
    monkeypatch.setenv(WORKERS_ENV, "2")
    assert run_rate_study(cfg).to_dict() == serial


def test_cosine_dictionary_orthonormal_in_population():
    x = (np.arange(4000) + 0.5) / 4000
    d = cosine_dictionary(x, 6)
    np.testing.assert_allclose(d.T @ d / 4000, np.eye(6), atol=1e-6)


def test_comparison_noiseless():
    res = run_objective_comparison(ComparisonConfig(sigma=0.0, spike_prob=0.0, replications=3))
    for r in res["replications"]:
        assert r["dantzig_mse"] <= 1e-12 and r["chebyshev_mse"] <= 1e-12


def test_comparison_gaussian_direction():
    res = run_objective_comparison(ComparisonConfig(spike_prob=0.0, replications=50, seed=1))
    assert res["summary"]["dantzig_win_rate"] >= 0.8


def test_comparison_gross_outlier():
    # a 15 sigma shift is about five times the largest Gaussian residual at n = 200
    res = run_objective_comparison(ComparisonConfig(spike_prob=0.0, outlier=15.0, replications=50, seed=2))
    assert res["summary"]["chebyshev_outlier_error_ratio"] >= 2.0
    assert res["summary"]["dantzig_outlier_error_ratio"] <= 1.2
