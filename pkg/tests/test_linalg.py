import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dantzig_lab.errors import NotSymmetricError
from dantzig_lab.linalg import max_singular_value, sym_eigs


def charpoly_roots(a):
    # independent oracle: roots of det(A - x I)
    return np.sort(np.roots(np.poly(a)).real)


def test_identity():
    np.testing.assert_allclose(sym_eigs(np.eye(3)), [1.0, 1.0, 1.0], atol=1e-14)


@pytest.mark.parametrize("r", [-0.9, -0.3, 0.0, 0.5, 0.99])
def test_two_by_two(r):
    np.testing.assert_allclose(sym_eigs(np.array([[1.0, r], [r, 1.0]])), [1 - abs(r), 1 + abs(r)], atol=1e-14)


@pytest.mark.parametrize("seed", range(5))
def test_random_5x5_against_characteristic_polynomial(seed):
    b = np.random.default_rng(seed).standard_normal((5, 5))
    a = (b + b.T) / 2
    np.testing.assert_allclose(sym_eigs(a), charpoly_roots(a), atol=1e-8)


def test_not_symmetric():
    with pytest.raises(NotSymmetricError):
        sym_eigs(np.array([[1.0, 2.0], [0.0, 1.0]]))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_reconstruction_trace_and_order(k, seed):
    b = np.random.default_rng(seed).standard_normal((k, k))
    a = b + b.T
    w, q = sym_eigs(a, vectors=True)
    assert np.all(np.diff(w) >= 0)
    assert abs(w.sum() - np.trace(a)) <= 1e-8 * max(1.0, np.abs(a).sum())
    assert np.linalg.norm(a - q @ np.diag(w) @ q.T) <= 1e-8 * max(np.linalg.norm(a), 1e-300)


@pytest.mark.parametrize(
    "m, expected",
    [(np.zeros((3, 2)), 0.0), (np.array([[-3.0]]), 3.0), (np.diag([2.0, 5.0]), 5.0)],
)
def test_max_singular_value_examples(m, expected):
    assert max_singular_value(m) == pytest.approx(expected, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_max_singular_value_matches_gram_eigenvalue(r, c, seed):
    m = np.random.default_rng(seed).standard_normal((r, c))
    top = max(charpoly_roots(m.T @ m)[-1], 0.0)
    assert max_singular_value(m) == pytest.approx(np.sqrt(top), rel=1e-7, abs=1e-10)
