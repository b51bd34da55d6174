"""Dense two-phase primal simplex.

Problems are stated as

    minimize    c^T x
    subject to  A x = b,  G x >= h,  (optionally x >= 0)

with free variables split as x = u - v. Dantzig pricing is used until a run of
degenerate pivots suggests stalling; from then on Bland's rule guarantees
termination.
"""
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .numkernel import as_vector, rank_factor

PIVOT_TOL = 1e-9

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LpProblem:
    objective: np.ndarray
    eq_lhs: np.ndarray = None
    eq_rhs: np.ndarray = None
    ineq_lhs: np.ndarray = None
    ineq_rhs: np.ndarray = None
    nonneg: bool = False

    def __post_init__(self):
        c = as_vector(self.objective, name="objective")
        k = c.shape[0]
        self.objective = c
        self.eq_lhs, self.eq_rhs = _block(self.eq_lhs, self.eq_rhs, k, "equality")
        self.ineq_lhs, self.ineq_rhs = _block(self.ineq_lhs, self.ineq_rhs, k, "inequality")

    @property
    def n_vars(self):
        return self.objective.shape[0]


def _block(M, v, k, what):
    if M is None:
        if v is not None and np.size(v):
            raise InputError(f"{what} right-hand side given without a matrix")
        return np.zeros((0, k)), np.zeros(0)
    M = np.asarray(M, dtype=float)
    if M.ndim == 1:
        M = M.reshape(1, -1)
    if M.ndim != 2 or M.shape[1] != k:
        raise InputError(f"{what} matrix has shape {M.shape}, expected (m, {k})")
    if not np.all(np.isfinite(M)):
        raise InputError(f"{what} matrix has non-finite entries")
    v = as_vector(v, M.shape[0], f"{what} right-hand side")
    return M, v


@dataclass
class LpResult:
    status: str
    point: np.ndarray = None
    value: float = float("nan")
    iterations: int = 0
    eq_duals: np.ndarray = None
    ineq_duals: np.ndarray = None
    cs_violation: float = float("nan")

    @property
    def ok(self):
        return self.status == OPTIMAL


def _pivot(T, r, j):
    T[r] /= T[r, j]
    col = T[:, j].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])


def _run(T, basis, allowed, counters, max_iter):
    """Simplex iterations on tableau T (last row holds reduced costs, last
    column the right-hand side). Returns 'optimal' or 'unbounded'."""
    m = T.shape[0] - 1
    stall_limit = 3 * (m + T.shape[1] - 1)
    cost_scale = max(1.0, float(np.max(np.abs(T[-1, :-1]), initial=0.0)))
    while counters["iter"] < max_iter:
        rc = T[-1, :-1]
        cand = np.flatnonzero(allowed & (rc < -PIVOT_TOL * cost_scale))
        if cand.size == 0:
            return OPTIMAL
        bland = counters["degenerate"] >= stall_limit
        j = int(cand[0]) if bland else int(cand[np.argmin(rc[cand])])
        col = T[:m, j]
        pos = np.flatnonzero(col > PIVOT_TOL)
        if pos.size == 0:
            return UNBOUNDED
        ratios = T[pos, -1] / col[pos]
        best = float(np.min(ratios))
        ties = pos[ratios <= best + 1e-12 * max(1.0, abs(best))]
        r = int(ties[np.argmin(basis[ties])])
        if best <= 1e-12:
            counters["degenerate"] += 1
        _pivot(T, r, j)
        basis[r] = j
        counters["iter"] += 1
    raise RuntimeError("simplex iteration cap reached")


def _standard_form(prob):
    """Return (A, b, c, recover) for min c z s.t. A z = b, z >= 0."""
    k = prob.n_vars
    A_eq, b_eq = prob.eq_lhs, prob.eq_rhs
    G, h = prob.ineq_lhs, prob.ineq_rhs
    if A_eq.shape[0]:
        fac = rank_factor(A_eq)
        U = fac.range_basis
        resid = b_eq - U @ (U.T @ b_eq)
        if np.max(np.abs(resid)) > 1e-9 * max(1.0, np.max(np.abs(b_eq))):
            return None
        # an equivalent full-row-rank system
        A_red = U.T @ A_eq
        b_red = U.T @ b_eq
    else:
        U = np.zeros((0, 0))
        A_red, b_red = np.zeros((0, k)), np.zeros(0)
    me, mi = A_red.shape[0], G.shape[0]
    if prob.nonneg:
        nx = k
        A_x_eq, A_x_in = A_red, G
        c_x = prob.objective
    else:
        nx = 2 * k
        A_x_eq = np.hstack([A_red, -A_red])
        A_x_in = np.hstack([G, -G])
        c_x = np.concatenate([prob.objective, -prob.objective])
    A = np.zeros((me + mi, nx + mi))
    A[:me, :nx] = A_x_eq
    A[me:, :nx] = A_x_in
    A[me:, nx:] = -np.eye(mi)
    b = np.concatenate([b_red, h])
    c = np.concatenate([c_x, np.zeros(mi)])

    def recover(z):
        return z[:k].copy() if prob.nonneg else z[:k] - z[k:2 * k]

    return A, b, c, recover, U, me


def _solve(prob, phase_one_only=False, max_iter=None):
    std = _standard_form(prob)
    if std is None:
        return LpResult(INFEASIBLE)
    A, b, c, recover, U, me = std
    m, N = A.shape
    flip = b < 0
    A = np.where(flip[:, None], -A, A)
    b = np.where(flip, -b, b)
    max_iter = max_iter or 50 * (m + N) + 1000
    counters = {"iter": 0, "degenerate": 0}

    # phase 1 with one artificial per row
    T = np.zeros((m + 1, N + m + 1))
    T[:m, :N] = A
    T[:m, N:N + m] = np.eye(m)
    T[:m, -1] = b
    T[-1, :N] = -A.sum(axis=0)
    T[-1, -1] = -b.sum()
    basis = np.arange(N, N + m)
    allowed = np.ones(N + m, dtype=bool)
    _run(T, basis, allowed, counters, max_iter)
    if -T[-1, -1] > 1e-9 * max(1.0, float(np.max(np.abs(b), initial=0.0))):
        return LpResult(INFEASIBLE, iterations=counters["iter"])

    # drive artificials out of the basis; rows that cannot pivot are redundant
    keep = np.ones(m, dtype=bool)
    for r in range(m):
        if basis[r] >= N:
            row = T[r, :N]
            js = np.flatnonzero(np.abs(row) > PIVOT_TOL)
            if js.size:
                _pivot(T, r, int(js[0]))
                basis[r] = int(js[0])
            else:
                keep[r] = False
    T = np.vstack([T[:m][keep], T[-1:]])
    basis = basis[keep]
    T = np.delete(T, np.s_[N:N + m], axis=1)
    m2 = basis.size

    if phase_one_only:
        c = np.zeros(N)
    T[-1, :N] = c
    T[-1, -1] = 0.0
    for r in range(m2):
        T[-1] -= c[basis[r]] * T[r]
    status = _run(T, basis, np.ones(N, dtype=bool), counters, max_iter)
    if status == UNBOUNDED:
        return LpResult(UNBOUNDED, iterations=counters["iter"])

    # recompute the basic solution from the original data
    z = np.zeros(N)
    rows = np.flatnonzero(keep)
    B = A[np.ix_(rows, basis)]
    try:
        zb = np.linalg.solve(B, b[rows])
        if np.min(zb, initial=0.0) < -1e-9 * max(1.0, np.max(np.abs(zb), initial=0.0)):
            raise np.linalg.LinAlgError
    except np.linalg.LinAlgError:
        zb = T[:m2, -1]
    z[basis] = np.maximum(zb, 0.0)
    x = recover(z)

    # dual certificate
    yB = np.linalg.lstsq(B.T, c[basis], rcond=None)[0]
    y_full = np.zeros(m)
    y_full[rows] = yB
    rc = c - A.T @ y_full
    cs = max(float(np.max(-rc, initial=0.0)), float(np.max(np.abs(rc * z), initial=0.0)))
    y_full = np.where(flip, -y_full, y_full)
    eq_duals = U @ y_full[:me] if me else np.zeros(prob.eq_lhs.shape[0])
    ineq_duals = y_full[me:]
    value = float(prob.objective @ x)
    return LpResult(OPTIMAL, x, value, counters["iter"], eq_duals, ineq_duals, cs)


def solve_lp(prob, max_iter=None):
    """Solve the LP; status is optimal, infeasible or unbounded."""
    if not isinstance(prob, LpProblem):
        raise InputError("solve_lp expects an LpProblem")
    return _solve(prob, max_iter=max_iter)


def feasible_point(prob, max_iter=None):
    """Phase-1 only: a feasible basic point (status optimal) or infeasible."""
    if not isinstance(prob, LpProblem):
        raise InputError("feasible_point expects an LpProblem")
    return _solve(prob, phase_one_only=True, max_iter=max_iter)


def max_violation(prob, x):
    """Largest constraint violation of x (used by tests and callers)."""
    v = 0.0
    if prob.eq_lhs.shape[0]:
        v = max(v, float(np.max(np.abs(prob.eq_lhs @ x - prob.eq_rhs))))
    if prob.ineq_lhs.shape[0]:
        v = max(v, float(np.max(prob.ineq_rhs - prob.ineq_lhs @ x, initial=0.0)))
    if prob.nonneg:
        v = max(v, float(np.max(-x, initial=0.0)))
    return v
