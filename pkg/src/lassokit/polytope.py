"""The lasso solution set as a polytope over the equicorrelation coordinates.

For fixed lambda every solution has the same fit, the same equicorrelation
set E and signs s. The E-coordinates of all solutions form

    K = {x : P x = P b_lars, S x >= 0},   P = projector onto row(X_E), S = diag(s)

with b_lars the minimum-l2-norm solution. P b_lars = X_E^+ fit, and b_lars
itself leaves row(X_E) when that pseudoinverse point has a wrong sign.
Working in z = S x turns K into {z >= 0 : P S z = P b_lars}, which is what
the LPs below operate on.
"""
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import CapabilityError, InconsistencyError, InputError, UnsupportedError
from .kkt import DEFAULT_TOL_EQ, EquiState, ProblemInstance, check_kkt, equicorrelation
from .larspath import min_norm_point
from .lp import LpProblem, feasible_point, solve_lp
from .numkernel import as_matrix, as_vector, colspace_projector, rank_factor
from .solvers import coordinate_descent

DISPENSABLE = "dispensable"
INDISPENSABLE = "indispensable"
DEFAULT_CAP = 16


def _threads():
    try:
        return max(1, int(os.environ.get("LASSOKIT_THREADS", "1")))
    except ValueError:
        return 1


def _map(fn, items):
    """Ordered map, threaded when LASSOKIT_THREADS > 1."""
    items = list(items)
    k = _threads()
    if k == 1 or len(items) < 2:
        return [fn(v) for v in items]
    with ThreadPoolExecutor(max_workers=k) as ex:
        return list(ex.map(fn, items))


@dataclass(frozen=True)
class PolytopeSpec:
    equi_state: EquiState
    lars_point: np.ndarray    # over E
    projection: np.ndarray    # |E| x |E|, projector onto row(X_E)
    sign_diag: np.ndarray     # |E| x |E|
    null_basis: np.ndarray    # |E| x dim null(X_E)
    p: int = 0
    fit: np.ndarray = field(default=None, repr=False)

    @property
    def members(self):
        return self.equi_state.members

    def embed(self, x):
        """Place an E-coordinate vector into R^p."""
        out = np.zeros(self.p)
        if self.members:
            out[list(self.members)] = x
        return out


@dataclass(frozen=True)
class BoundsReport:
    members: tuple
    signs: tuple
    lower: np.ndarray
    upper: np.ndarray
    lars_value: np.ndarray
    classification: tuple
    shared_l1_norm: float
    lower_points: tuple = field(default=(), repr=False)   # attaining points in R^p
    upper_points: tuple = field(default=(), repr=False)


@dataclass(frozen=True)
class JointZeroResult:
    feasible: bool
    witness: np.ndarray = None

    def __bool__(self):
        return self.feasible


@dataclass(frozen=True)
class UniquenessVerdict:
    unique: bool
    rank: int
    size: int
    null_dim: int
    equi_state: EquiState

    @property
    def label(self):
        return "unique" if self.unique else "non-unique"

    @property
    def rationale(self):
        return (f"rank(X_E) = {self.rank}, |E| = {self.size}, "
                f"dim null(X_E) = {self.null_dim}")


def _lasso_fit(X, E, s, y, lam):
    """Exact fit for given (E, s): X_E X_E^+ y - lam * (X_E^+)^T s."""
    XE = X[:, list(E)]
    fac = rank_factor(XE)
    r = fac.rank
    U, V, sv = fac.range_basis, fac.rowspace_basis, fac.singular_values[:r]
    return U @ (U.T @ y) - lam * (U @ ((V.T @ s) / sv)), fac


def solution_polytope(inst, beta=None, tol_eq=DEFAULT_TOL_EQ):
    """Build K from any solution (coordinate descent unless beta is given)."""
    if not isinstance(inst, ProblemInstance):
        raise InputError("solution_polytope expects a ProblemInstance")
    lam = inst.lam
    if lam <= 0:
        raise UnsupportedError("the solution polytope is defined for lambda > 0")
    if beta is None:
        beta = coordinate_descent(inst, tol=max(1e-3 * tol_eq * lam, 1e-14)).solution
    beta = as_vector(beta, inst.p, "beta")
    state = equicorrelation(inst, inst.X @ beta, tol_eq)
    E = state.members
    k = len(E)
    if k == 0:
        return PolytopeSpec(state, np.zeros(0), np.zeros((0, 0)), np.zeros((0, 0)),
                            np.zeros((0, 0)), inst.p, np.zeros(inst.n))
    s = state.sign_vector
    fit, fac = _lasso_fit(inst.X, E, s, inst.y, lam)
    XE = inst.X[:, list(E)]
    lars = min_norm_point(XE, fit, s)
    V = fac.rowspace_basis
    return PolytopeSpec(state, lars, V @ V.T, np.diag(s), fac.null_basis, inst.p, fit)


def _z_problem(spec, objective, drop=()):
    """LP over z = S x >= 0 restricted to K, with the coordinates in drop fixed
    at zero (removed from the problem)."""
    k = len(spec.members)
    keep = [m for m in range(k) if m not in set(drop)]
    A = (spec.projection @ spec.sign_diag)[:, keep]
    rhs = spec.projection @ spec.lars_point
    return LpProblem(np.asarray(objective, dtype=float)[keep], A, rhs, nonneg=True), keep


def _z_to_x(spec, z, keep):
    full = np.zeros(len(spec.members))
    full[keep] = z
    return spec.sign_diag @ full


def _extreme(spec, m, sense):
    k = len(spec.members)
    c = np.zeros(k)
    c[m] = sense
    prob, keep = _z_problem(spec, c)
    res = solve_lp(prob)
    if not res.ok:
        raise InconsistencyError(f"bound LP for coordinate {spec.members[m]} returned "
                                 f"{res.status}; the solution polytope cannot be empty")
    return _z_to_x(spec, res.point, keep)


def coefficient_bounds(spec):
    """Per-coordinate range of each equicorrelation coefficient over all solutions."""
    E = spec.members
    k = len(E)
    s = np.diag(spec.sign_diag) if k else np.zeros(0)
    L = float(np.sum(np.abs(spec.lars_point)))
    jobs = [(m, sense) for m in range(k) for sense in (1.0, -1.0)]
    pts = _map(lambda job: _extreme(spec, *job), jobs)
    lower = np.zeros(k)
    upper = np.zeros(k)
    lo_pts, hi_pts, cls = [], [], []
    ztol = 1e-9 * max(L, 1e-300)
    for m in range(k):
        zmin = s[m] * pts[2 * m][m]
        zmax = s[m] * pts[2 * m + 1][m]
        zmin = 0.0 if zmin <= ztol else zmin
        zmax = max(zmax, zmin)
        if s[m] > 0:
            lower[m], upper[m] = zmin, zmax
            lo_pts.append(spec.embed(pts[2 * m]))
            hi_pts.append(spec.embed(pts[2 * m + 1]))
        else:
            lower[m], upper[m] = -zmax, -zmin
            lo_pts.append(spec.embed(pts[2 * m + 1]))
            hi_pts.append(spec.embed(pts[2 * m]))
        cls.append(DISPENSABLE if zmin == 0.0 else INDISPENSABLE)
    return BoundsReport(E, spec.equi_state.signs, lower, upper, spec.lars_point.copy(),
                        tuple(cls), L, tuple(lo_pts), tuple(hi_pts))


def _positions(spec, indices):
    pos = {i: m for m, i in enumerate(spec.members)}
    out = []
    for i in indices:
        if int(i) not in pos:
            raise InputError(f"index {int(i)} is not in the equicorrelation set {spec.members}")
        out.append(pos[int(i)])
    return out


def joint_zero_feasible(spec, zero_set):
    """Whether some solution has all coefficients in zero_set equal to zero."""
    drop = _positions(spec, zero_set)
    if not spec.members:
        return JointZeroResult(True, np.zeros(spec.p))
    prob, keep = _z_problem(spec, np.zeros(len(spec.members)), drop)
    res = feasible_point(prob)
    if not res.ok:
        return JointZeroResult(False, None)
    return JointZeroResult(True, spec.embed(_z_to_x(spec, res.point, keep)))


def _face_support(spec, drop):
    """Maximal support (positions in E) of the face K with z_drop = 0, or None
    when the face is empty. Each remaining coordinate is maximized separately
    because LP vertices understate the support of a face."""
    k = len(spec.members)
    prob, keep = _z_problem(spec, np.zeros(k), drop)
    res = feasible_point(prob)
    if not res.ok:
        return None
    L = float(np.sum(np.abs(spec.lars_point)))
    ztol = 1e-9 * max(L, 1e-300)
    z0 = np.zeros(k)
    z0[keep] = res.point
    support = set(m for m in keep if z0[m] > ztol)
    for m in keep:
        if m in support:
            continue
        c = np.zeros(k)
        c[m] = -1.0
        p2, keep2 = _z_problem(spec, c, drop)
        r2 = solve_lp(p2)
        if r2.ok:
            z = np.zeros(k)
            z[keep2] = r2.point
            support |= set(j for j in keep2 if z[j] > ztol)
    return frozenset(support)


def enumerate_active_sets(spec, cap=DEFAULT_CAP):
    """All supports of lasso solutions at this lambda (0-based variable indices).

    Depth-first over faces: from a face with support A, zeroing any i in A
    gives a subface whose maximal support is recorded. Every realizable
    support is reached this way, and each is expanded once."""
    E = spec.members
    k = len(E)
    if k > cap:
        raise CapabilityError(f"|E| = {k} exceeds the enumeration cap {cap}")
    if k == 0:
        return [()]
    top = _face_support(spec, ())
    if top is None:
        raise InconsistencyError("the solution polytope is empty")
    seen = {top}
    stack = [top]
    while stack:
        A = stack.pop()
        for m in sorted(A):
            drop = tuple(j for j in range(k) if j not in A or j == m)
            sub = _face_support(spec, drop)
            if sub is None or sub in seen:
                continue
            seen.add(sub)
            stack.append(sub)
    sets = [tuple(sorted(E[m] for m in A)) for A in seen]
    return sorted(sets, key=lambda a: (len(a), a))


def reduce_to_independent(inst, beta, kkt_tol=1e-8):
    """Move along null-space directions of the active columns until they are
    linearly independent; fit and l1 norm are unchanged."""
    b = as_vector(beta, inst.p, "beta").copy()
    if inst.lam > 0 and not check_kkt(inst, b, tol=kkt_tol).passed:
        raise InputError("beta is not a lasso solution at this lambda")
    thr = 1e-11 * float(np.max(np.abs(b), initial=0.0))
    b[np.abs(b) <= thr] = 0.0
    while True:
        A = np.flatnonzero(b)
        if A.size == 0:
            return b
        fac = rank_factor(inst.X[:, A])
        if fac.rank == A.size:
            return b
        v = fac.null_basis[:, 0]
        with np.errstate(divide="ignore"):
            t = np.where(v != 0, -b[A] / v, np.inf)
        at = np.abs(t)
        tmin = float(np.min(at))
        m = int(np.flatnonzero(at <= tmin * (1 + 1e-12))[0])
        b[A] = b[A] + t[m] * v
        b[A[m]] = 0.0
        thr = 1e-11 * float(np.max(np.abs(b), initial=0.0))
        b[np.abs(b) <= thr] = 0.0


def min_l1_least_squares(X, y):
    """Minimum-l1-norm least-squares solution, by LP on X beta = X X^+ y."""
    X = as_matrix(X, "X")
    y = as_vector(y, X.shape[0], "y")
    p = X.shape[1]
    U = rank_factor(X).range_basis
    target = U @ (U.T @ y)
    if not np.any(target):
        return np.zeros(p)
    prob = LpProblem(np.ones(2 * p), np.hstack([X, -X]), target, nonneg=True)
    res = solve_lp(prob)
    if not res.ok:
        raise InconsistencyError(f"min-l1 least-squares LP returned {res.status}")
    return res.point[:p] - res.point[p:]


def active_subspace_check(inst, active_sets):
    """Largest pairwise operator-norm distance between the projectors onto
    col(X_A) over the given active sets."""
    X = inst.X if isinstance(inst, ProblemInstance) else as_matrix(inst, "X")
    n = X.shape[0]
    projs = []
    for A in active_sets:
        A = list(A)
        projs.append(colspace_projector(X[:, A]) if A else np.zeros((n, n)))
    worst = 0.0
    for a in range(len(projs)):
        for b in range(a + 1, len(projs)):
            worst = max(worst, float(np.linalg.norm(projs[a] - projs[b], 2)))
    return worst


def uniqueness_verdict(inst, beta=None, tol_eq=DEFAULT_TOL_EQ):
    """Unique iff X_E has full column rank, with E taken from the fit."""
    if inst.lam <= 0:
        raise UnsupportedError("uniqueness verdict is defined for lambda > 0")
    if beta is None:
        beta = coordinate_descent(inst, tol=max(1e-3 * tol_eq * inst.lam, 1e-14)).solution
    state = equicorrelation(inst, inst.X @ as_vector(beta, inst.p, "beta"), tol_eq)
    k = len(state)
    r = rank_factor(inst.X[:, list(state.members)]).rank if k else 0
    return UniquenessVerdict(r == k, r, k, k - r, state)
