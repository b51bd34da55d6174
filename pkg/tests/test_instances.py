import numpy as np
import pytest

from lassokit.errors import InputError
from lassokit.instances import KINDS, generate, lambda_grid


@pytest.mark.parametrize("kind", KINDS)
def test_deterministic(kind):
    a = generate(kind, 6, 8, 123)
    b = generate(kind, 6, 8, 123)
    assert all(np.array_equal(u, v) for u, v in zip(a, b))
    assert a[0].shape == (6, 8) and a[1].shape == (6,)


def test_duplicated_fixture():
    X, y = generate("duplicated", 1, 2, 0)
    np.testing.assert_array_equal(X, [[1.0, 1.0]])
    np.testing.assert_array_equal(y, [2.0])


def test_duplicated_has_copies():
    X, _ = generate("duplicated", 7, 9, 4)
    cols = {tuple(c) for c in X.T}
    assert len(cols) < 9


def test_averaged_recipe():
    X, y = generate("averaged-column", 5, 10, 42)
    np.testing.assert_allclose(X[:, 3], 0.5 * (X[:, 1] + X[:, 2]))
    assert np.linalg.matrix_rank(X[:, :4]) == 3
    np.testing.assert_allclose(X[:, :4].T @ X[:, 4:], 0, atol=1e-12)
    np.testing.assert_allclose(y, -X[:, 0] + X[:, 1] + X[:, 2])


def test_binary_entries():
    X, _ = generate("binary-design", 10, 12, 1)
    assert set(np.unique(X)) <= {0.0, 1.0}


def test_errors():
    with pytest.raises(InputError):
        generate("uniform", 3, 3, 0)
    with pytest.raises(InputError):
        generate("gaussian", 0, 3, 0)
    with pytest.raises(InputError):
        generate("averaged-column", 5, 3, 0)
    with pytest.raises(InputError):
        generate("gaussian", 3, 3, None)


def test_lambda_grid():
    X, y = generate("gaussian", 6, 4, 0)
    lam = lambda_grid(X, y, 5, np.random.default_rng(0))
    lmax = np.max(np.abs(X.T @ y))
    assert np.all(np.diff(lam) < 0)
    assert np.all((lam > 0.05 * lmax) & (lam < 0.95 * lmax))
