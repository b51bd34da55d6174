"""Seeded problem generators: Gaussian designs and the degenerate designs
(duplicated columns, an averaged column, binary entries) that make lasso
solutions non-unique."""
import numpy as np

from .errors import InputError

KINDS = ("gaussian", "duplicated", "averaged-column", "binary-design")


def generate(kind, n, p, seed):
    """Return (X, y) for the given kind; identical arguments give identical bits."""
    if kind not in KINDS:
        raise InputError(f"unknown instance kind {kind!r}; choose from {', '.join(KINDS)}")
    n, p = int(n), int(p)
    if n < 1 or p < 1:
        raise InputError(f"need n >= 1 and p >= 1, got n={n}, p={p}")
    if seed is None:
        raise InputError("a seed is required")
    rng = np.random.default_rng(int(seed))
    if kind == "gaussian":
        X = rng.standard_normal((n, p))
        y = rng.standard_normal(n)
    elif kind == "duplicated":
        X, y = _duplicated(rng, n, p)
    elif kind == "averaged-column":
        X, y = _averaged(rng, n, p)
    else:
        X = rng.integers(0, 2, size=(n, p)).astype(float)
        y = rng.standard_normal(n)
    return X, y


def _duplicated(rng, n, p):
    if n == 1 and p == 2:
        return np.array([[1.0, 1.0]]), np.array([2.0])
    if p < 2:
        raise InputError("duplicated instances need p >= 2")
    q = p - p // 2
    base = rng.standard_normal((n, q))
    extra = rng.integers(0, q, size=p - q)
    X = np.hstack([base, base[:, extra]])
    beta = np.zeros(q)
    beta[: min(q, 3)] = rng.choice([-1.0, 1.0], size=min(q, 3))
    y = base @ beta + 0.5 * rng.standard_normal(n)
    return X, y


def _averaged(rng, n, p):
    if p < 4:
        raise InputError("averaged-column instances need p >= 4")
    if p > 4 and n < 4:
        raise InputError("averaged-column instances with p > 4 need n >= 4")
    X = np.empty((n, p))
    X[:, :3] = rng.standard_normal((n, 3))
    X[:, 3] = 0.5 * (X[:, 1] + X[:, 2])
    if p > 4:
        R = rng.standard_normal((n, p - 4))
        Q, _ = np.linalg.qr(X[:, :4])
        # X4 is dependent, so span(X1..X4) has dimension 3
        Q = Q[:, :3]
        X[:, 4:] = R - Q @ (Q.T @ R)
    y = -X[:, 0] + X[:, 1] + X[:, 2]
    return X, y


def lambda_grid(X, y, count, rng, lo=0.05, hi=0.95):
    """Random lambda values spread over (lo, hi) * lambda_max."""
    lmax = float(np.max(np.abs(X.T @ y)))
    return np.sort(rng.uniform(lo, hi, size=count))[::-1] * lmax
