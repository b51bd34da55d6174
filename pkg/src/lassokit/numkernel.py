"""Dense linear-algebra kernels with a single numerical-rank policy.

Every pseudoinverse, projection and null-space computation in the package goes
through `rank_factor`, so all equicorrelation and degeneracy decisions share
the same threshold.
"""
from dataclasses import dataclass

import numpy as np
from scipy.optimize import nnls

from .errors import InputError

DEFAULT_REL_TOL = 1e-10


@dataclass(frozen=True)
class RankFactorization:
    rank: int
    range_basis: np.ndarray      # n x r, orthonormal columns spanning col(M)
    rowspace_basis: np.ndarray   # p x r, orthonormal columns spanning row(M)
    singular_values: np.ndarray  # all min(n, p) singular values, nonincreasing
    tolerance_used: float
    null_basis: np.ndarray       # p x (p - r)


def as_matrix(M, name="matrix"):
    A = np.asarray(M, dtype=float)
    if A.ndim == 1:
        A = A.reshape(1, -1) if A.size else A.reshape(0, 0)
    if A.ndim != 2:
        raise InputError(f"{name} must be two-dimensional, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InputError(f"{name} has non-finite entries")
    return A


def as_vector(v, length=None, name="vector"):
    x = np.asarray(v, dtype=float).reshape(-1)
    if not np.all(np.isfinite(x)):
        raise InputError(f"{name} has non-finite entries")
    if length is not None and x.shape[0] != length:
        raise InputError(f"{name} has length {x.shape[0]}, expected {length}")
    return x


def rank_factor(M, rel_tol=DEFAULT_REL_TOL):
    """SVD-based rank-revealing factorization.

    The numerical rank counts singular values above
    rel_tol * sigma_max * max(rows, cols).
    """
    if not rel_tol > 0:
        raise InputError("rel_tol must be positive")
    A = as_matrix(M)
    n, p = A.shape
    if n == 0 or p == 0:
        return RankFactorization(0, np.zeros((n, 0)), np.zeros((p, 0)),
                                 np.zeros(0), 0.0, np.eye(p))
    U, sv, Vt = np.linalg.svd(A, full_matrices=True)
    tol = rel_tol * (sv[0] if sv.size else 0.0) * max(n, p)
    r = int(np.sum(sv > tol)) if sv.size and sv[0] > 0 else 0
    return RankFactorization(
        rank=r,
        range_basis=U[:, :r].copy(),
        rowspace_basis=Vt[:r].T.copy(),
        singular_values=sv,
        tolerance_used=float(tol),
        null_basis=Vt[r:].T.copy(),
    )


def pinv_apply(M, v, rel_tol=DEFAULT_REL_TOL, fac=None):
    """Return M^+ v, the minimum-norm least-squares solution of M x ~ v."""
    A = as_matrix(M)
    x = as_vector(v, A.shape[0], "v")
    if fac is None:
        fac = rank_factor(A, rel_tol)
    r = fac.rank
    if r == 0:
        return np.zeros(A.shape[1])
    coef = (fac.range_basis.T @ x) / fac.singular_values[:r]
    return fac.rowspace_basis @ coef


def pinv(M, rel_tol=DEFAULT_REL_TOL):
    A = as_matrix(M)
    fac = rank_factor(A, rel_tol)
    r = fac.rank
    return (fac.rowspace_basis / fac.singular_values[:r]) @ fac.range_basis.T


def project_rowspace(M, v, rel_tol=DEFAULT_REL_TOL, fac=None):
    """Orthogonal projection of v onto row(M)."""
    A = as_matrix(M)
    x = as_vector(v, A.shape[1], "v")
    if fac is None:
        fac = rank_factor(A, rel_tol)
    B = fac.rowspace_basis
    return B @ (B.T @ x)


def project_colspace(M, v, rel_tol=DEFAULT_REL_TOL, fac=None):
    """Orthogonal projection of v onto col(M)."""
    A = as_matrix(M)
    x = as_vector(v, A.shape[0], "v")
    if fac is None:
        fac = rank_factor(A, rel_tol)
    U = fac.range_basis
    return U @ (U.T @ x)


def colspace_projector(M, rel_tol=DEFAULT_REL_TOL):
    U = rank_factor(M, rel_tol).range_basis
    return U @ U.T


def least_distance(G, h, rel_tol=1e-10):
    """Minimum-norm t with G t >= h, or None when infeasible.

    Uses the classical reduction of least-distance programming to
    nonnegative least squares, then re-solves on the active constraints to
    remove the NNLS roundoff."""
    G = np.asarray(G, dtype=float)
    h = np.asarray(h, dtype=float)
    m, q = G.shape
    if m == 0 or np.all(h <= 0):
        return np.zeros(q)
    scale = max(float(np.max(np.abs(h))), 1e-300)
    E = np.vstack([G.T, h[None, :]])
    f = np.zeros(q + 1)
    f[-1] = 1.0
    u, _ = nnls(E, f, maxiter=50 * (m + q + 1))
    res = E @ u - f
    if abs(res[-1]) <= 1e-14:
        return None
    t = -res[:q] / res[-1]
    act = np.flatnonzero(G @ t - h <= 1e-9 * scale)
    if act.size:
        t2 = pinv(G[act], rel_tol) @ h[act]
        if np.min(G @ t2 - h) >= -1e-12 * scale and t2 @ t2 <= t @ t * (1 + 1e-9) + 1e-300:
            t = t2
    return t


def nullspace_basis(M, rel_tol=DEFAULT_REL_TOL):
    """Orthonormal basis of null(M); shape (cols, 0) when the null space is trivial."""
    return rank_factor(M, rel_tol).null_basis


def numerical_rank(M, rel_tol=DEFAULT_REL_TOL):
    return rank_factor(M, rel_tol).rank


# compensated products and sums (error-free transformations in double precision)

_SPLITTER = 134217729.0  # 2**27 + 1


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _two_prod(a, b):
    p = a * b
    ca = _SPLITTER * a
    ah = ca - (ca - a)
    al = a - ah
    cb = _SPLITTER * b
    bh = cb - (cb - b)
    bl = b - bh
    return p, al * bl - (((p - ah * bh) - al * bh) - ah * bl)


def accurate_matvec(A, x, base=None, sign=1.0):
    """base + sign * A @ x summed with compensation, accurate to about one
    rounding of the result even under heavy cancellation."""
    A = np.asarray(A, dtype=float)
    x = np.asarray(x, dtype=float)
    s = np.zeros(A.shape[0]) if base is None else np.array(base, dtype=float)
    comp = np.zeros_like(s)
    for j in range(A.shape[1]):
        if x[j] == 0.0:
            continue
        prod, e1 = _two_prod(A[:, j], sign * x[j])
        s, e2 = _two_sum(s, prod)
        comp += e1 + e2
    return s + comp


def accurate_residual(X, beta, y):
    """y - X @ beta with compensated summation."""
    return accurate_matvec(X, beta, base=y, sign=-1.0)
