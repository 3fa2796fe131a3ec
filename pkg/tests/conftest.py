import numpy as np
import pytest

from dantzig_lab.problem import RegressionProblem, orthogonal_design


def normalized_gaussian(n, p, rng):
    x = rng.standard_normal((n, p))
    return x * (np.sqrt(n) / np.linalg.norm(x, axis=0))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def orthogonal_problem(rng):
    n = p = 32
    x = orthogonal_design(n, p, rng)
    beta = np.zeros(p)
    beta[:4] = [3.0, -2.0, 1.0, 0.5]
    y = x @ beta + 0.3 * rng.standard_normal(n)
    return RegressionProblem(x, y, 0.3)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(module.RESULTS):
        terminalreporter.write_line(line)
