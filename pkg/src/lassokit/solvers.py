"""Reference solvers: coordinate descent for the lasso and elastic net, and
proximal gradient for l1-penalized squared, logistic and Poisson losses."""
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConvergenceError, DivergenceError, InputError, UnsupportedError
from .kkt import ProblemInstance
from .numkernel import as_matrix, as_vector

POISSON_ETA_CAP = 30.0


@dataclass(frozen=True)
class SolveCertificate:
    solution: np.ndarray
    kkt_gap: float
    iterations: int
    duality_gap: float = float("nan")
    method: str = ""


def _en_gap(X, y, beta, lam1, lam2):
    """KKT residual of 0.5||y - X b||^2 + lam1 ||b||_1 + lam2/2 ||b||^2."""
    g = X.T @ (y - X @ beta) - lam2 * beta
    nz = beta != 0
    gap = float(np.max(np.maximum(np.abs(g) - lam1, 0.0)))
    if np.any(nz):
        gap = max(gap, float(np.max(np.abs(g[nz] - lam1 * np.sign(beta[nz])))))
    return gap


def lasso_duality_gap(X, y, beta, lam):
    r = y - X @ beta
    primal = 0.5 * float(r @ r) + lam * float(np.sum(np.abs(beta)))
    cmax = float(np.max(np.abs(X.T @ r)))
    theta = r * (min(1.0, lam / cmax) if cmax > 0 else 1.0)
    dual = 0.5 * float(y @ y) - 0.5 * float((y - theta) @ (y - theta))
    return primal - dual


def _run_cd(X, y, beta, lam1, lam2, tol, max_sweeps, sweep):
    Xf = np.asfortranarray(X)
    r = y - X @ beta
    col_sq = np.einsum("ij,ij->j", X, X)
    p = X.shape[1]
    full = np.arange(p, dtype=np.int64)
    scale = max(1.0, float(np.max(np.abs(X.T @ y))))
    sweeps = 0
    while sweeps < max_sweeps:
        dmax = sweep(Xf, beta, r, col_sq, lam1, lam2, 1, full)
        sweeps += 1
        if dmax <= tol * scale:
            break
        active = np.flatnonzero(beta).astype(np.int64)
        # iterate on the active set until it settles, then recheck everything
        for _ in range(50):
            if active.size == 0 or sweeps >= max_sweeps:
                break
            d = sweep(Xf, beta, r, col_sq, lam1, lam2, 1, active)
            sweeps += 1
            if d <= tol * scale:
                break
    return beta, sweeps


def _newton_direction(XW, r, bW, lam1, lam2, sW, rel_tol=1e-10):
    """Step solving the sign-fixed subproblem on the working set, where r is
    the residual y - X beta and bW the working coefficients.

    Returns (step, exact). When lam2 == 0 and the linear term has a
    component in null(X_W) the subproblem is unbounded and the returned step
    is a descent ray inside the null space (exact=False).
    """
    U, sv, Vt = np.linalg.svd(XW, full_matrices=True)
    k = XW.shape[1]
    sig = np.zeros(k)
    sig[:sv.size] = sv
    cut = rel_tol * (sv[0] if sv.size else 0.0) * max(XW.shape)
    sig[sig <= cut] = 0.0
    # V' X_W' r = sig * U' r exactly vanishes on null(X_W); forming X_W' r
    # first would leave roundoff there that a small lam2 amplifies
    m = min(k, U.shape[1])
    xr = np.zeros(k)
    xr[:m] = sig[:m] * (U[:, :m].T @ r)
    # on null(X_W) the optimal coefficient is -lam1 v's / lam2; v's at
    # roundoff level is a zero that the SVD did not reproduce exactly
    vs = Vt @ sW
    vs[(sig == 0.0) & (np.abs(vs) <= 64 * np.finfo(float).eps * np.sqrt(k))] = 0.0
    coef = xr - lam2 * (Vt @ bW) - lam1 * vs
    rhs = Vt.T @ coef
    curv = sig ** 2 + lam2
    null = curv == 0.0
    if lam2 == 0.0 and np.any(null):
        nc = coef[null]
        if np.max(np.abs(nc), initial=0.0) > 1e-9 * max(1.0, np.max(np.abs(rhs))) * max(lam1, 1.0):
            ray = Vt[null].T @ nc
            return ray, False
    coef = np.where(null, 0.0, coef / np.where(null, 1.0, curv))
    return Vt.T @ coef, True


def _active_set_polish(X, y, beta, lam1, lam2, tol, max_iter=None):
    """Primal active-set method on the sign-constrained working-set problem.

    Starting from a warm point, it finishes the (elastic-net) lasso exactly up
    to roundoff. Returns the polished point, or None if it does not settle.
    """
    p = X.shape[1]
    beta = beta.copy()
    W = list(np.flatnonzero(beta))
    signs = {int(i): float(np.sign(beta[i])) for i in W}
    max_iter = max_iter or 4 * p + 50
    g_scale = max(lam1, float(np.max(np.abs(X.T @ y))), 1e-300)
    for _ in range(max_iter):
        g_all = X.T @ (y - X @ beta) - lam2 * beta
        if W:
            idx = np.array(W)
            sW = np.array([signs[int(i)] for i in W])
            step, exact = _newton_direction(X[:, idx], y - X @ beta, beta[idx], lam1, lam2, sW)
            bW = beta[idx]
            target = bW + step
            neg = sW * target < 0 if exact else sW * step < 0
            if np.any(neg):
                with np.errstate(divide="ignore", invalid="ignore"):
                    ratios = np.where(neg, np.abs(bW) / np.abs(step), np.inf)
                alpha = float(np.min(ratios))
                if exact:
                    alpha = min(alpha, 1.0)
                hit = np.flatnonzero(ratios <= alpha * (1 + 1e-12) + 1e-300)
                beta[idx] = bW + alpha * step
                for j in hit:
                    beta[idx[j]] = 0.0
                W = [i for k, i in enumerate(W) if k not in set(hit.tolist())]
                continue
            if not exact:
                return None  # unbounded with no blocking coordinate: impossible for a lasso
            beta[idx] = target
        g_all = X.T @ (y - X @ beta) - lam2 * beta
        out = np.ones(p, dtype=bool)
        if W:
            out[np.array(W)] = False
        viol = np.where(out, np.abs(g_all) - lam1, -np.inf)
        j = int(np.argmax(viol))
        if viol[j] <= 1e-13 * g_scale:
            return beta
        W.append(j)
        W.sort()
        signs[j] = float(np.sign(g_all[j]))
    return None


def _solve_en(X, y, lam1, lam2, tol, max_iter, beta0, backend, method):
    _, sweep = kernels.get_backend(backend)
    p = X.shape[1]
    beta = np.zeros(p) if beta0 is None else as_vector(beta0, p, "beta0").copy()
    if float(np.max(np.abs(X.T @ y))) <= lam1 and beta0 is None:
        return SolveCertificate(np.zeros(p), 0.0, 0, 0.0 if lam2 == 0 else float("nan"), method)
    total = 0
    cd_tol = 1e-6
    best = None
    while total < max_iter:
        beta, used = _run_cd(X, y, beta, lam1, lam2, cd_tol, max_iter - total, sweep)
        total += used
        polished = _active_set_polish(X, y, beta, lam1, lam2, tol)
        cand = polished if polished is not None else beta
        gap = _en_gap(X, y, cand, lam1, lam2)
        if best is None or gap < best[1]:
            best = (cand.copy(), gap)
        if gap <= tol:
            break
        cd_tol *= 1e-2
        if cd_tol < 1e-16:
            break
    sol, gap = best
    if gap > tol:
        raise ConvergenceError(f"{method} did not reach KKT gap {tol:g} (gap {gap:.3g})",
                               gap=gap, iterations=total)
    dgap = lasso_duality_gap(X, y, sol, lam1) if lam2 == 0 else float("nan")
    return SolveCertificate(sol, gap, total, dgap, method)


def coordinate_descent(inst, tol=1e-10, max_iter=200000, beta0=None, backend=None):
    """Cyclic coordinate descent with an exact active-set finish.

    Terminates when the KKT gap is at most tol; the certificate also carries
    the duality gap at the dual point obtained by rescaling the residual.
    """
    if inst.lam <= 0:
        raise UnsupportedError("coordinate descent needs lambda > 0")
    return _solve_en(inst.X, inst.y, inst.lam, 0.0, tol, max_iter, beta0, backend, "cd")


def elastic_net(X, y, lambda1, lambda2, tol=1e-10, max_iter=200000, beta0=None, backend=None):
    """Minimizer of 0.5||y - Xb||^2 + lambda1 ||b||_1 + lambda2/2 ||b||^2."""
    X = as_matrix(X, "X")
    y = as_vector(y, X.shape[0], "y")
    if not (lambda1 > 0 and lambda2 > 0):
        raise InputError("elastic net needs lambda1 > 0 and lambda2 > 0")
    return _solve_en(X, y, float(lambda1), float(lambda2), tol, max_iter, beta0, backend, "en")


# ---------------------------------------------------------------------------
# general losses

@dataclass(frozen=True)
class LossSpec:
    kind: str
    response: np.ndarray
    allow_any_response: bool = False

    def __post_init__(self):
        if self.kind not in ("squared", "logistic", "poisson"):
            raise InputError(f"unknown loss kind {self.kind!r}")
        y = as_vector(self.response, name="response")
        if not self.allow_any_response:
            if self.kind == "logistic" and (np.any(y < 0) or np.any(y > 1)):
                raise InputError("logistic responses must lie in [0, 1]")
            if self.kind == "poisson" and np.any(y < 0):
                raise InputError("poisson responses must be nonnegative")
        object.__setattr__(self, "response", y)

    def value(self, u):
        y = self.response
        if self.kind == "squared":
            return 0.5 * float((y - u) @ (y - u))
        if self.kind == "logistic":
            return float(np.sum(np.logaddexp(0.0, u) - y * u))
        return float(np.sum(np.exp(u) - y * u))

    def grad(self, u):
        y = self.response
        if self.kind == "squared":
            return u - y
        if self.kind == "logistic":
            return 0.5 * (1.0 + np.tanh(0.5 * u)) - y
        return np.exp(u) - y


def _soft(z, t):
    return np.sign(z) * np.maximum(np.abs(z) - t, 0.0)


def general_kkt_gap(loss, X, beta, lam):
    g = -(X.T @ loss.grad(X @ beta))
    nz = beta != 0
    gap = float(np.max(np.maximum(np.abs(g) - lam, 0.0)))
    if np.any(nz):
        gap = max(gap, float(np.max(np.abs(g[nz] - lam * np.sign(beta[nz])))))
    return gap


def _hessian_weights(loss, u):
    if loss.kind == "squared":
        return np.ones_like(u)
    if loss.kind == "logistic":
        m = 0.5 * (1.0 + np.tanh(0.5 * u))
        return m * (1.0 - m)
    return np.exp(u)


def _newton_finish(loss, X, beta, lam, tol, max_iter=50):
    """Newton's method on the smooth problem restricted to the current
    support with signs held fixed. Returns a point or None if the signs or
    the cap break; the caller certifies the result by the KKT gap."""
    A = np.flatnonzero(beta)
    if A.size == 0:
        return None
    XA = X[:, A]
    s = np.sign(beta[A])
    b = beta[A].copy()

    def obj(v):
        u = XA @ v
        if loss.kind == "poisson" and np.max(u) > POISSON_ETA_CAP:
            return np.inf
        return loss.value(u) + lam * float(s @ v)

    fb = obj(b)
    for _ in range(max_iter):
        u = XA @ b
        g = XA.T @ loss.grad(u) + lam * s
        H = XA.T @ (XA * _hessian_weights(loss, u)[:, None])
        try:
            step = -np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            return None
        t = 1.0
        while t > 1e-12:
            cand = b + t * step
            fc = obj(cand)
            if fc <= fb + 1e-4 * t * float(g @ step):
                break
            t *= 0.5
        else:
            break
        if np.any(np.sign(cand) != s):
            return None
        done = np.max(np.abs(cand - b)) <= 1e-15 * max(1.0, np.max(np.abs(cand)))
        b, fb = cand, fc
        if done or np.max(np.abs(g)) <= 0.1 * tol:
            break
    out = np.zeros_like(beta)
    out[A] = b
    return out


def prox_grad_l1(loss, X, lam, tol=1e-10, max_iter=200000, beta0=None, newton_finish=True):
    """Proximal gradient with backtracking on f(X b) + lam ||b||_1.

    Each step starts from step size 1 and halves until the quadratic upper
    bound holds. Once the support has been stable for a while, a Newton solve
    restricted to that support is tried; it is accepted only when the
    generalized KKT gap certifies it. Stops when that gap is at most tol.
    """
    X = as_matrix(X, "X")
    n, p = X.shape
    if loss.response.shape[0] != n:
        raise InputError(f"response has length {loss.response.shape[0]}, expected {n}")
    if not lam > 0:
        raise UnsupportedError("proximal gradient needs lambda > 0")
    beta = np.zeros(p) if beta0 is None else as_vector(beta0, p, "beta0").copy()
    poisson = loss.kind == "poisson"
    u = X @ beta
    if poisson and np.max(u, initial=-np.inf) > POISSON_ETA_CAP:
        raise DivergenceError("starting point has Poisson linear predictor above the cap")
    f = loss.value(u)
    grad = X.T @ loss.grad(u)
    name = f"proxgrad-{loss.kind}"
    stable = 0
    next_try = 20
    for it in range(1, max_iter + 1):
        gap = general_kkt_gap(loss, X, beta, lam)
        if gap <= tol:
            return SolveCertificate(beta, gap, it - 1, method=name)
        if newton_finish and stable >= next_try:
            cand = _newton_finish(loss, X, beta, lam, tol)
            if cand is not None:
                cgap = general_kkt_gap(loss, X, cand, lam)
                if cgap <= tol:
                    return SolveCertificate(cand, cgap, it - 1, method=name)
            next_try *= 2
        t = 1.0
        capped = False
        while True:
            cand = _soft(beta - t * grad, t * lam)
            diff = cand - beta
            u_new = X @ cand
            if poisson and np.max(u_new) > POISSON_ETA_CAP:
                capped = True
            else:
                f_new = loss.value(u_new)
                if f_new <= f + float(grad @ diff) + float(diff @ diff) / (2 * t) + 1e-15 * abs(f):
                    break
            t *= 0.5
            if t < 1e-30:
                if capped:
                    raise DivergenceError("Poisson linear predictor exceeds the cap "
                                          f"{POISSON_ETA_CAP:g}; iterates diverge",
                                          gap=gap, iterations=it)
                raise ConvergenceError("backtracking failed to find a descent step",
                                       gap=gap, iterations=it)
        if not np.any(diff):
            gap = general_kkt_gap(loss, X, cand, lam)
            if gap <= tol:
                return SolveCertificate(cand, gap, it, method=name)
            raise ConvergenceError(f"proximal gradient stalled at KKT gap {gap:.3g}",
                                   gap=gap, iterations=it)
        same = np.array_equal(np.sign(cand), np.sign(beta))
        stable = stable + 1 if same else 0
        beta, u, f = cand, u_new, f_new
        grad = X.T @ loss.grad(u)
    gap = general_kkt_gap(loss, X, beta, lam)
    raise ConvergenceError(f"proximal gradient hit {max_iter} iterations (gap {gap:.3g})",
                           gap=gap, iterations=max_iter)


def solve(inst, method="cd", loss="squared", lambda2=None, tol=1e-10, seed=None):
    """Dispatch used by the command line."""
    if method == "cd":
        return coordinate_descent(inst, tol=tol)
    if method == "en":
        if lambda2 is None:
            raise InputError("method 'en' requires lambda2")
        return elastic_net(inst.X, inst.y, inst.lam, lambda2, tol=tol)
    if method == "proxgrad":
        if not isinstance(loss, LossSpec):
            loss = LossSpec(loss or "squared", inst.y)
        return prox_grad_l1(loss, inst.X, inst.lam, tol=tol)
    raise InputError(f"unknown method {method!r}")


__all__ = ["SolveCertificate", "LossSpec", "coordinate_descent", "elastic_net",
           "prox_grad_l1", "general_kkt_gap", "lasso_duality_gap", "solve",
           "ProblemInstance"]
