"""Lasso objective, KKT diagnostics, equicorrelation extraction and the
general-position test."""
from dataclasses import dataclass, field
from itertools import combinations, product

import numpy as np

from .errors import CapabilityError, InconsistencyError, InputError, UnsupportedError
from .numkernel import accurate_matvec, accurate_residual, as_matrix, as_vector

DEFAULT_TOL_EQ = 1e-9


@dataclass(frozen=True)
class ProblemInstance:
    X: np.ndarray
    y: np.ndarray
    lam: float = 0.0

    def __post_init__(self):
        X = as_matrix(self.X, "X")
        if X.shape[0] < 1 or X.shape[1] < 1:
            raise InputError(f"X must have n >= 1 and p >= 1, got shape {X.shape}")
        y = as_vector(self.y, X.shape[0], "y")
        lam = float(self.lam)
        if not np.isfinite(lam) or lam < 0:
            raise InputError(f"lambda must be finite and nonnegative, got {self.lam}")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "lam", lam)

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def p(self):
        return self.X.shape[1]

    def with_lambda(self, lam):
        return ProblemInstance(self.X, self.y, lam)

    def lambda_max(self):
        return float(np.max(np.abs(self.X.T @ self.y)))


@dataclass(frozen=True)
class EquiState:
    members: tuple = ()
    signs: tuple = ()
    lam: float = 0.0

    def __post_init__(self):
        members = tuple(int(i) for i in self.members)
        signs = tuple(int(s) for s in self.signs)
        if len(members) != len(signs):
            raise InputError("members and signs must have equal length")
        if any(b <= a for a, b in zip(members, members[1:])):
            raise InputError(f"members must be strictly increasing, got {members}")
        if any(s not in (-1, 1) for s in signs):
            raise InputError(f"signs must be +-1, got {signs}")
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "signs", signs)
        object.__setattr__(self, "lam", float(self.lam))

    @property
    def index(self):
        return np.array(self.members, dtype=int)

    @property
    def sign_vector(self):
        return np.array(self.signs, dtype=float)

    def __len__(self):
        return len(self.members)


@dataclass(frozen=True)
class KktReport:
    stationarity_gap: float
    sign_violation: float
    equi_state: EquiState
    passed: bool
    tol: float
    support: tuple = field(default=())


def _check_beta(inst, beta):
    return as_vector(beta, inst.p, "beta")


def lasso_objective(inst, beta):
    """0.5 * ||y - X beta||^2 + lambda * ||beta||_1."""
    b = _check_beta(inst, beta)
    r = inst.y - inst.X @ b
    return 0.5 * float(r @ r) + inst.lam * float(np.sum(np.abs(b)))


def support_of(beta, rel_zero=1e-12):
    """Indices of entries that are nonzero relative to the largest entry."""
    b = np.asarray(beta, dtype=float)
    scale = np.max(np.abs(b)) if b.size else 0.0
    if scale == 0.0:
        return np.zeros(0, dtype=int)
    return np.flatnonzero(np.abs(b) > rel_zero * scale)


def check_kkt(inst, beta, tol=1e-8, tol_eq=DEFAULT_TOL_EQ):
    """Graded check of the lasso stationarity and subgradient conditions."""
    b = _check_beta(inst, beta)
    lam = inst.lam
    if lam <= 0:
        raise UnsupportedError("KKT check needs lambda > 0; use the least-squares "
                               "normal equations at lambda = 0")
    r = accurate_residual(inst.X, b, inst.y)
    corr = accurate_matvec(inst.X.T, r)
    acorr = np.abs(corr)
    supp = support_of(b)
    gap = float(np.max(np.maximum(acorr - lam, 0.0)))
    sign_viol = 0.0
    if supp.size:
        gap = max(gap, float(np.max(np.abs(acorr[supp] - lam))))
        sign_viol = float(np.max(np.abs(np.sign(b[supp]) - corr[supp] / lam)))
    state = _equi_from_corr(corr, lam, tol_eq)
    passed = gap <= tol and sign_viol <= tol
    return KktReport(gap, sign_viol, state, bool(passed), float(tol), tuple(int(i) for i in supp))


def _equi_from_corr(corr, lam, tol_eq):
    scale = max(lam, float(np.max(np.abs(corr))) if corr.size else 0.0)
    thr = tol_eq * scale
    members = np.flatnonzero(np.abs(np.abs(corr) - lam) <= thr)
    signs = np.where(corr[members] >= 0, 1, -1)
    return EquiState(tuple(members), tuple(signs), lam)


def equicorrelation(inst, fit, tol_eq=DEFAULT_TOL_EQ):
    """Equicorrelation set and signs determined by the (unique) lasso fit."""
    lam = inst.lam
    if lam <= 0:
        raise UnsupportedError("equicorrelation set is defined for lambda > 0")
    u = as_vector(fit, inst.n, "fit")
    corr = accurate_matvec(inst.X.T, inst.y - u)
    state = _equi_from_corr(corr, lam, tol_eq)
    if len(state) == 0 and np.max(np.abs(u)) > 0:
        raise InconsistencyError("nonzero fit but no variable attains correlation lambda; "
                                 "the fit does not come from a lasso solution")
    return state


@dataclass(frozen=True)
class GeneralPositionResult:
    in_general_position: bool
    witness: dict = None

    def __bool__(self):
        return self.in_general_position


def general_position_check(X, max_p=12, rel_tol=1e-9):
    """Exhaustive test that no affine span of k+1 signed columns (k < n)
    contains another signed column.

    On failure the witness holds the spanning subset, its signs, and the
    offending column with its sign (0-based indices).
    """
    A = as_matrix(X, "X")
    n, p = A.shape
    if p > max_p:
        raise CapabilityError(f"general position check is exhaustive; p={p} exceeds cap {max_p}")
    scale = max(1.0, float(np.max(np.abs(A)))) if A.size else 1.0
    lifted_targets = np.vstack([A, np.ones((1, p))])
    for size in range(1, min(n, p - 1) + 1):
        for subset in combinations(range(p), size):
            others = [i for i in range(p) if i not in subset]
            for tail in product((1, -1), repeat=size - 1):
                sig = np.array((1,) + tail, dtype=float)
                L = np.vstack([A[:, subset] * sig, np.ones((1, size))])
                Q, R = np.linalg.qr(L)
                keep = np.abs(np.diag(R)) > rel_tol * scale
                Q = Q[:, keep]
                for sgn in (1, -1):
                    T = lifted_targets[:, others].copy()
                    T[:n] *= sgn
                    res = T - Q @ (Q.T @ T)
                    bad = np.flatnonzero(np.max(np.abs(res), axis=0) <= rel_tol * scale * max(n, p))
                    if bad.size:
                        i = others[bad[0]]
                        return GeneralPositionResult(False, {
                            "subset": tuple(subset), "signs": tuple(int(s) for s in sig),
                            "target": i, "target_sign": sgn,
                            "indices": tuple(sorted(subset + (i,)))})
    return GeneralPositionResult(True, None)
