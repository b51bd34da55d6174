"""Generalized LARS lasso path for arbitrary design matrices.

The path follows the minimum-l2-norm lasso solution. On each segment the
equicorrelation coefficients are affine in lambda, beta_E(lambda) = c - lambda*d,
with c = (X_E)^+ y and d = (X_E^T X_E)^+ s whenever that point has the right
signs. When it does not, some coordinates of E are pinned at zero (the
"zero set" Z) and the segment is the minimum-norm point of the face
{x_Z = 0}; c and d then carry the corresponding null-space correction.

Knots are events where a variable joins E, leaves E (cross), gets pinned at
zero (zero) or is released from the pin (release). At each knot the next
state is read off the least-norm dual direction and the minimum-norm point
just past the knot. If that piece fails the KKT check, every admissible
continuation is tried and the one giving the smallest norm is taken.
"""
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import CyclingError, InputError, RangeError
from .kkt import EquiState, ProblemInstance, check_kkt, equicorrelation
from .numkernel import (accurate_matvec, accurate_residual, as_matrix, as_vector,
                        least_distance, nullspace_basis, pinv, rank_factor)

TOL_TIE = 1e-9
MAX_FLEX = 12
# event times below LAMBDA_FLOOR * lambda_max are indistinguishable from roundoff
LAMBDA_FLOOR = 1e-11
REFINE_STEPS = 2

DECREASING = "decreasing"
INCREASING = "increasing"


@dataclass(frozen=True)
class Event:
    type: str            # join | cross | zero | release | start | terminal
    index: int = -1      # 0-based variable index, -1 when not applicable
    sign: int = 0


@dataclass(frozen=True)
class PathKnot:
    lambda_k: float
    equi_state: EquiState
    c: np.ndarray        # segment coefficients over E: beta_E = c - lambda*d
    d: np.ndarray
    event: Event
    zero_set: tuple = ()

    def beta(self, lam, p):
        out = np.zeros(p)
        if len(self.equi_state):
            out[self.equi_state.index] = _affine(self.c, self.d, lam)
        return out


def _affine(c, d, lam):
    """c - lam*d with entries below the cancellation error of their terms set to 0."""
    v = c - lam * d
    v[np.abs(v) <= 1e-13 * (np.abs(c) + np.abs(lam * d))] = 0.0
    return v


@dataclass(frozen=True)
class LassoPath:
    knots: tuple
    terminal_lambda: float
    p: int
    direction: str = DECREASING
    start_lambda: float = np.inf
    history: tuple = field(default=(), repr=False)

    @property
    def lambdas(self):
        return np.array([k.lambda_k for k in self.knots])

    def __len__(self):
        return len(self.knots)


# ---------------------------------------------------------------------------
# segment pieces

@dataclass
class _Piece:
    E: tuple
    s: np.ndarray
    Z: tuple
    cp: np.ndarray
    dp: np.ndarray
    wc: np.ndarray
    wd: np.ndarray
    a: np.ndarray
    b: np.ndarray
    consistent: bool
    s_resid: float = 0.0

    def key(self):
        return (self.E, tuple(int(v) for v in self.s), self.Z)

    def value(self, lam, p):
        out = np.zeros(p)
        if self.E:
            out[list(self.E)] = _affine(self.cp, self.dp, lam)
        return out

    def nu(self, lam):
        zi = [self.E.index(i) for i in self.Z]
        return self.s[zi] * (self.wc - lam * self.wd)


class _Base:
    """Per-E quantities shared by every choice of zero set."""

    def __init__(self, X, y, E, s):
        self.E = E
        self.s = s
        if not E:
            self.c = self.d = np.zeros(0)
            self.B = np.zeros((0, 0))
            self.a = X.T @ y
            self.b = np.zeros(X.shape[1])
            self.s_resid = 0.0
            return
        XE = X[:, list(E)]
        fac = rank_factor(XE)
        r = fac.rank
        V, U, sv = fac.rowspace_basis, fac.range_basis, fac.singular_values[:r]
        c = V @ ((U.T @ y) / sv)
        d = V @ ((V.T @ s) / sv ** 2)
        # iterative refinement with compensated residuals
        for _ in range(REFINE_STEPS):
            res = accurate_residual(XE, c, y)
            c = c + V @ ((U.T @ res) / sv)
            g = accurate_matvec(XE.T, accurate_matvec(XE, d), base=s, sign=-1.0)
            d = d + V @ ((V.T @ g) / sv ** 2)
        self.c, self.d = c, d
        self.s_resid = float(np.max(np.abs(s - V @ (V.T @ s))))
        self.B = fac.null_basis
        self.a = accurate_matvec(X.T, accurate_residual(XE, c, y))
        self.b = accurate_matvec(X.T, accurate_matvec(XE, d))

    def piece(self, Z):
        E, s = self.E, self.s
        cons = self.s_resid <= 1e-8
        if not Z or self.B.shape[1] == 0:
            # with a trivial null space a pinned coordinate cannot move
            cons = cons and not Z
            cp, dp = self.c.copy(), self.d.copy()
            wc = wd = np.zeros(len(Z))
            return _Piece(E, s, Z, cp, dp, wc, wd, self.a, self.b, cons, self.s_resid)
        zi = [E.index(i) for i in Z]
        BZ = self.B[zi]
        BZp = pinv(BZ)
        cZ, dZ = self.c[zi], self.d[zi]
        cp = self.c - self.B @ (BZp @ cZ)
        dp = self.d - self.B @ (BZp @ dZ)
        cons = cons and _small(cp[zi], self.c) and _small(dp[zi], self.d)
        cp[zi] = 0.0
        dp[zi] = 0.0
        Mp = pinv(BZ @ BZ.T)
        wc = -Mp @ cZ
        wd = -Mp @ dZ
        return _Piece(E, s, Z, cp, dp, wc, wd, self.a, self.b, cons, self.s_resid)


def _small(v, ref):
    scale = max(float(np.max(np.abs(ref), initial=0.0)), 1e-300)
    return float(np.max(np.abs(v), initial=0.0)) <= 1e-8 * scale


# ---------------------------------------------------------------------------
# event detection

def _event_times(piece, lam_k, delta, lam_stop, p, floor=0.0):
    """Candidate event times strictly beyond lam_k in direction delta.

    Returns a list of (time, type, index, sign)."""
    out = []
    E = piece.E
    inE = np.zeros(p, dtype=bool)
    inE[list(E)] = True
    a, b = piece.a, piece.b
    with np.errstate(divide="ignore", invalid="ignore"):
        for sig in (1.0, -1.0):
            den = sig - b
            t = a / den
            ok = (~inE) & (den != 0) & np.isfinite(t)
            for j in np.flatnonzero(ok):
                out.append((float(t[j]), "join", int(j), int(sig)))
        W = [i for i in E if i not in piece.Z]
        for i in W:
            k = E.index(i)
            if piece.dp[k] != 0:
                out.append((float(piece.cp[k] / piece.dp[k]), "cross", i, int(piece.s[k])))
        for m, i in enumerate(piece.Z):
            if piece.wd[m] != 0:
                out.append((float(piece.wc[m] / piece.wd[m]), "release", i,
                            int(piece.s[E.index(i)])))
    if delta < 0:
        hi = lam_k * (1 - TOL_TIE) if np.isfinite(lam_k) else np.inf
        keep = [e for e in out if lam_stop < e[0] < hi and e[0] > floor]
    else:
        lo = lam_k * (1 + TOL_TIE)
        keep = [e for e in out if lo < e[0] < lam_stop]
    return keep


def _pick_events(cands, delta):
    if not cands:
        return None, []
    if delta < 0:
        t = max(e[0] for e in cands)
        batch = [e for e in cands if e[0] >= t - TOL_TIE * t]
    else:
        t = min(e[0] for e in cands)
        batch = [e for e in cands if e[0] <= t + TOL_TIE * t]
    return t, batch


# ---------------------------------------------------------------------------
# knot resolution

class _Scales:
    def __init__(self, X, y):
        self.lam_max = float(np.max(np.abs(X.T @ y)))
        cn = np.linalg.norm(X, axis=0)
        cn = cn[cn > 0]
        self.coef_unit = float(np.linalg.norm(y) / cn.max()) if cn.size else 1.0
        self.coef_unit = max(self.coef_unit, 1e-300)
        self.group = _column_groups(X)


def _column_groups(X):
    """Group id per column; columns equal up to sign share an id. Such columns
    have tied correlations and, by symmetry of the minimum-norm solution,
    equal-magnitude coefficients, so they change state together."""
    p = X.shape[1]
    gid = np.arange(p)
    scale = np.max(np.abs(X), axis=0)
    for j in range(p):
        if gid[j] != j:
            continue
        for k in range(j + 1, p):
            if gid[k] != k:
                continue
            tol = 1e-12 * max(scale[j], scale[k], 1e-300)
            if np.max(np.abs(X[:, j] - X[:, k])) <= tol or np.max(np.abs(X[:, j] + X[:, k])) <= tol:
                gid[k] = j
    return gid


def _valid(piece, x_k, lam, delta, sc, p, flex_out):
    """Whether the segment described by piece is a lasso solution just beyond
    lam (in direction delta) that passes continuously through x_k."""
    if not piece.consistent:
        return False
    E = list(piece.E)
    xscale = max(float(np.max(np.abs(x_k))), sc.coef_unit * 1e-3)
    val = piece.value(lam, p)
    if np.max(np.abs(val - x_k)) > 1e-7 * xscale:
        return False
    ztol = 1e-9 * xscale
    dscale = max(float(np.max(np.abs(piece.dp), initial=0.0)), 1e-300)
    Zset = set(piece.Z)
    for k, i in enumerate(E):
        if i in Zset:
            continue
        v = piece.s[k] * val[i]
        if v > ztol:
            continue
        if v < -ztol:
            return False
        if piece.s[k] * (-delta * piece.dp[k]) < -1e-9 * dscale:
            return False
    if piece.Z:
        nu = piece.nu(lam)
        nscale = max(float(np.max(np.abs(piece.wc))), lam * float(np.max(np.abs(piece.wd))),
                     sc.coef_unit * 1e-3)
        slope = -delta * piece.s[[E.index(i) for i in piece.Z]] * piece.wd
        sscale = max(float(np.max(np.abs(piece.wd))), 1e-300)
        for m in range(len(piece.Z)):
            if nu[m] > 1e-9 * nscale:
                continue
            if nu[m] < -1e-9 * nscale:
                return False
            if slope[m] < -1e-9 * sscale:
                return False
    corr = piece.a + lam * piece.b
    inE = np.zeros(p, dtype=bool)
    inE[E] = True
    ctol = 1e-9 * max(lam, 1e-6 * sc.lam_max)
    bscale = max(1.0, float(np.max(np.abs(piece.b))))
    for j in np.flatnonzero(~inE):
        g = abs(corr[j]) - lam
        if g < -ctol:
            continue
        if g > 10 * ctol and j not in flex_out:
            return False
        if g > 1e3 * ctol:
            return False
        sig = np.sign(corr[j]) if corr[j] != 0 else 1.0
        if delta * (sig * piece.b[j] - 1.0) > 1e-9 * bscale:
            return False
    return True


def _score(piece, x_k, delta, p):
    dp = np.zeros(p)
    if piece.E:
        dp[list(piece.E)] = piece.dp
    return -delta * float(x_k @ dp), float(dp @ dp)


def _resolve(X, y, state, x_k, lam, delta, batch, sc):
    """Choose the state (E, s, Z) that continues the path beyond lam."""
    p = X.shape[1]
    E0, s0, Z0 = state
    sign_of = dict(zip(E0, s0))
    xscale = max(float(np.max(np.abs(x_k))), sc.coef_unit * 1e-3)
    ztol = 1e-9 * xscale
    corr = X.T @ (y - X @ x_k)
    ctol = 1e-9 * max(lam, 1e-6 * sc.lam_max)
    fixed_w = [i for i in E0 if abs(x_k[i]) > ztol]
    flex = [i for i in E0 if abs(x_k[i]) <= ztol]
    joiners = {e[2]: e[3] for e in batch if e[1] == "join"}
    for j in range(p):
        if j in sign_of:
            continue
        if j in joiners or abs(abs(corr[j]) - lam) <= 10 * ctol:
            flex.append(j)
            sign_of[j] = joiners.get(j, 1 if corr[j] >= 0 else -1)
    # coordinates in one column group move together
    gid = sc.group
    forced = set(gid[i] for i in fixed_w)
    for i in list(flex):
        if gid[i] in forced:
            flex.remove(i)
            fixed_w.append(i)
    units = {}
    for i in sorted(flex):
        units.setdefault(int(gid[i]), []).append(i)
    units = list(units.values())
    flex_out = set(j for j in flex if j not in E0)
    piece = _resolve_direct(X, y, x_k, lam, delta, sorted(fixed_w), sorted(flex), sign_of, sc,
                            flex_out)
    if piece is not None:
        return piece
    if len(units) > MAX_FLEX:
        raise CyclingError(f"{len(units)} variable groups are simultaneously degenerate at "
                           f"lambda={lam:.6g}; more than the supported {MAX_FLEX}")
    fit_now = X @ x_k
    fit_tol = 1e-7 * max(1.0, np.linalg.norm(y))
    best = None
    for members in product((False, True), repeat=len(units)):
        chosen = [u for u, m in zip(units, members) if m]
        E = tuple(sorted(fixed_w + [i for u in chosen for i in u]))
        s = np.array([sign_of[i] for i in E], dtype=float)
        base = _Base(X, y, E, s)
        if base.s_resid > 1e-8:
            continue
        fit_new = X[:, list(E)] @ (base.c - lam * base.d) if E else np.zeros(X.shape[0])
        if np.max(np.abs(fit_new - fit_now), initial=0.0) > fit_tol:
            continue
        for zmask in product((False, True), repeat=len(chosen)):
            Z = tuple(sorted(i for u, z in zip(chosen, zmask) if z for i in u))
            piece = base.piece(Z)
            if not _valid(piece, x_k, lam, delta, sc, p, flex_out):
                continue
            f1, f2 = _score(piece, x_k, delta, p)
            key = (f1, f2, -len(E), len(Z))
            if best is None or _better(key, best[0]):
                best = (key, piece)
    if best is None:
        return None
    return best[1]


def _fit_direction(X, strong, weak, sign_of, delta):
    """Rate of change of the residual just beyond the knot.

    The residual is the projection of y onto {|X^T r| <= lambda}; its
    one-sided derivative w is the least-norm vector with
    sign_j X_j^T w = delta on the strong set (nonzero coefficients) and
    sign_j X_j^T w <= delta on the weak boundary set. Returns (w, slack)."""
    n = X.shape[0]
    A_s = (X[:, strong] * np.array([sign_of[i] for i in strong])).T
    A_w = (X[:, weak] * np.array([sign_of[i] for i in weak])).T
    if strong:
        fac = rank_factor(A_s)
        r = fac.rank
        w0 = fac.rowspace_basis @ ((fac.range_basis.T @ np.full(len(strong), delta))
                                   / fac.singular_values[:r])
        if np.max(np.abs(A_s @ w0 - delta)) > 1e-8:
            return None
        N = fac.null_basis
    else:
        w0 = np.zeros(n)
        N = np.eye(n)
    if weak and N.shape[1]:
        t = least_distance(-A_w @ N, A_w @ w0 - delta)
        if t is None:
            return None
        w = w0 + N @ t
    else:
        w = w0
    return w, delta - A_w @ w


def _resolve_direct(X, y, x_k, lam, delta, strong, weak, sign_of, sc, flex_out):
    """Continuation from the one-sided derivative of the fit.

    The tight constraints of the direction problem give the next
    equicorrelation set; its zero set is read off the minimum-norm point a
    short step beyond the knot. The result must pass the same validity test
    as an enumerated candidate, otherwise None is returned."""
    p = X.shape[1]
    got = _fit_direction(X, strong, weak, sign_of, delta)
    if got is None:
        return None
    w, slack = got
    wscale = max(1.0, float(np.max(np.abs(X), initial=0.0)) * float(np.sum(np.abs(w))))
    tight = [j for j, sl in zip(weak, slack) if sl <= 1e-7 * wscale]
    E = tuple(sorted(strong + tight))
    s = np.array([sign_of[i] for i in E], dtype=float)
    base = _Base(X, y, E, s)
    if base.s_resid > 1e-8:
        return None
    if not E:
        piece = base.piece(())
        return piece if _valid(piece, x_k, lam, delta, sc, p, flex_out) else None
    XE = X[:, list(E)]
    xscale = max(float(np.max(np.abs(x_k))), sc.coef_unit * 1e-3)
    at_zero = set(i for i in E if abs(x_k[i]) <= 1e-9 * xscale)
    tried = set()
    for h in (1e-3, 1e-5, 1e-7, 1e-9):
        lam_t = lam * (1 + delta * h)
        try:
            x_t = min_norm_point(XE, XE @ (base.c - lam_t * base.d), s)
        except InputError:
            continue
        Z = tuple(i for k, i in enumerate(E) if i in at_zero and x_t[k] == 0.0)
        if Z in tried:
            continue
        tried.add(Z)
        piece = base.piece(Z)
        if _valid(piece, x_k, lam, delta, sc, p, flex_out):
            return piece
    return None


def _better(k1, k2):
    tol1 = 1e-9 * max(abs(k1[0]), abs(k2[0]), 1e-300) + 1e-14 * max(k1[1], k2[1])
    if k1[0] < k2[0] - tol1:
        return True
    if k1[0] > k2[0] + tol1:
        return False
    tol2 = 1e-9 * max(k1[1], k2[1], 1e-300)
    if k1[1] < k2[1] - tol2:
        return True
    if k1[1] > k2[1] + tol2:
        return False
    return k1[2:] < k2[2:]


def _changes(old, new):
    """Ordered event list turning state old into state new."""
    E0, s0, Z0 = old
    E1, s1, Z1 = new
    sgn0, sgn1 = dict(zip(E0, s0)), dict(zip(E1, s1))
    ev = []
    for i in E0:
        if i not in sgn1:
            ev.append(("cross", i, int(sgn0[i])))
    for i in E1:
        if i in sgn0 and i in Z1 and i not in Z0:
            ev.append(("zero", i, int(sgn1[i])))
    for i in Z0:
        if i in sgn1 and i not in Z1:
            ev.append(("release", i, int(sgn1[i])))
    for i in E1:
        if i not in sgn0:
            ev.append(("join", i, int(sgn1[i])))
    return ev


def _apply(state, ev):
    E, s, Z = state
    sign = dict(zip(E, s))
    Z = set(Z)
    typ, i, sg = ev
    if typ == "cross":
        del sign[i]
        Z.discard(i)
    elif typ == "zero":
        Z.add(i)
    elif typ == "release":
        Z.discard(i)
    else:
        sign[i] = sg
    E = tuple(sorted(sign))
    return E, tuple(sign[k] for k in E), tuple(sorted(Z & set(E)))


def _knot(lam, state, c, d, ev_type, index, sign):
    E, s, Z = state
    return PathKnot(float(lam), EquiState(E, s, lam), np.asarray(c, dtype=float),
                    np.asarray(d, dtype=float), Event(ev_type, index, sign), tuple(Z))


def _emit(knots, lam, old_state, piece, x_k):
    """Append knots for the transition old_state -> piece at lam, one per
    changed coordinate; all but the last are zero-length segments."""
    new_state = (piece.E, tuple(int(v) for v in piece.s), piece.Z)
    evs = _changes(old_state, new_state)
    # joins into the zero set appear as a join; the pin is carried by zero_set
    st = old_state
    for k, ev in enumerate(evs):
        st = _apply(st, ev)
        if k == len(evs) - 1:
            st = new_state
            knots.append(_knot(lam, st, piece.cp, piece.dp, *ev))
        else:
            E = st[0]
            knots.append(_knot(lam, st, x_k[list(E)], np.zeros(len(E)), *ev))
    return len(evs)


def _march(X, y, piece, lam_k, delta, lam_stop, sc, knots, history, budget):
    p = X.shape[1]
    seen = {piece.key()}
    while True:
        cands = _event_times(piece, lam_k, delta, lam_stop, p, LAMBDA_FLOOR * sc.lam_max)
        t, batch = _pick_events(cands, delta)
        if t is None:
            return piece
        x_k = piece.value(t, p)
        for e in batch:
            if e[1] == "cross":
                x_k[e[2]] = 0.0
        old = (piece.E, tuple(int(v) for v in piece.s), piece.Z)
        new = _resolve(X, y, old, x_k, t, delta, batch, sc)
        if new is None:
            raise CyclingError(f"no admissible continuation of the path at lambda={t:.17g}",
                               history=history)
        lam_k = t
        if new.key() == piece.key():
            continue
        if new.key() in seen:
            raise CyclingError(f"state (E, s, Z) repeated at lambda={t:.17g}", history=history)
        seen.add(new.key())
        history.append((t, new.E, tuple(int(v) for v in new.s), new.Z))
        _emit(knots, t, old, new, x_k)
        if len(knots) > budget:
            raise CyclingError(f"path exceeded its budget of {budget} knots", history=history)
        piece = new


def _budget(p):
    return (3 ** p + 1) // 2 if p <= 12 else 100 * p + 10000


def _prepare(X, y):
    X = as_matrix(X, "X")
    y = as_vector(y, X.shape[0], "y")
    if X.shape[0] < 1 or X.shape[1] < 1:
        raise InputError("X must be nonempty")
    return X, y


def lars_path(X, y, lambda_min=0.0):
    """Minimum-norm lasso solution path from lambda = inf down to lambda_min."""
    X, y = _prepare(X, y)
    if not (np.isfinite(lambda_min) and lambda_min >= 0):
        raise InputError("lambda_min must be finite and nonnegative")
    p = X.shape[1]
    sc = _Scales(X, y)
    piece = _Base(X, y, (), np.zeros(0)).piece(())
    knots, history = [], []
    _march(X, y, piece, np.inf, -1.0, lambda_min, sc, knots, history, _budget(p))
    return LassoPath(tuple(knots), float(lambda_min), p, DECREASING, np.inf, tuple(history))


# ---------------------------------------------------------------------------
# knot-level formulas

def joining_times(knot, X, y):
    """Joining time of every variable outside E for the segment of knot.

    Returns (times, best_index, best_sign, best_time); times is -inf for
    variables in E or without a candidate in [0, lambda_k]."""
    X, y = _prepare(X, y)
    p = X.shape[1]
    E = list(knot.equi_state.members)
    lam_k = knot.lambda_k
    if E:
        XE = X[:, E]
        a = X.T @ (y - XE @ knot.c)
        b = X.T @ (XE @ knot.d)
    else:
        a, b = X.T @ y, np.zeros(p)
    times = np.full(p, -np.inf)
    signs = np.zeros(p, dtype=int)
    tie = TOL_TIE * max(lam_k, 1e-300) if np.isfinite(lam_k) else 0.0
    for j in range(p):
        if j in E:
            continue
        for sig in (1, -1):
            den = sig - b[j]
            if abs(den) <= 1e-12 and abs(a[j]) <= 1e-12 * max(1.0, abs(a).max()):
                t = lam_k  # tied with the current knot
            elif den == 0:
                continue
            else:
                t = a[j] / den
            if 0 <= t <= lam_k + tie and t > times[j]:
                times[j], signs[j] = min(t, lam_k), sig
    if np.all(np.isneginf(times)):
        return times, -1, 0, -np.inf
    j = int(np.argmax(times))
    return times, j, int(signs[j]), float(times[j])


def crossing_times(knot):
    """Crossing time c_i/d_i of every member of E that lies in [0, lambda_k);
    0 marks no event. Returns (times over E, best_index, best_sign, best_time)."""
    E = knot.equi_state.members
    if not E:
        return np.zeros(0), -1, 0, 0.0
    lam_k = knot.lambda_k
    times = np.zeros(len(E))
    with np.errstate(divide="ignore", invalid="ignore"):
        r = knot.c / knot.d
    for k in range(len(E)):
        if np.isfinite(r[k]) and 0 <= r[k] < lam_k * (1 - TOL_TIE):
            times[k] = r[k]
    if not np.any(times > 0):
        return times, -1, 0, 0.0
    k = int(np.argmax(times))
    return times, E[k], knot.equi_state.signs[k], float(times[k])


# ---------------------------------------------------------------------------
# evaluation

def _segment_index(path, lam):
    lams = path.lambdas
    # at a knot, use the segment that ends there; the event coordinate is then
    # exactly zero instead of carrying the roundoff of the next segment
    if path.direction == DECREASING:
        idx = np.flatnonzero(lams > lam)
        if idx.size and np.any(lams == lam):
            return int(idx[-1])
        idx = np.flatnonzero(lams >= lam)
        return int(idx[-1]) if idx.size else -1
    idx = np.flatnonzero(lams < lam)
    if idx.size and np.any(lams == lam):
        return int(idx[-1])
    idx = np.flatnonzero(lams <= lam)
    return int(idx[-1]) if idx.size else -1


def solution_at(path, lam):
    """Evaluate the piecewise-linear path at lam."""
    lam = float(lam)
    if path.direction == DECREASING:
        if lam < path.terminal_lambda * (1 - 1e-15) - 1e-300 or lam > path.start_lambda:
            raise RangeError(f"lambda={lam:g} outside the path range "
                             f"[{path.terminal_lambda:g}, {path.start_lambda:g}]")
        k = _segment_index(path, lam)
        if k < 0:
            return np.zeros(path.p)
    else:
        lo = path.knots[0].lambda_k
        if lam < lo or lam > path.terminal_lambda:
            raise RangeError(f"lambda={lam:g} outside the path range "
                             f"[{lo:g}, {path.terminal_lambda:g}]")
        k = _segment_index(path, lam)
    return path.knots[k].beta(lam, path.p)


def segment_midpoints(path):
    """Midpoints of all segments of positive length (used by checks)."""
    lams = list(path.lambdas)
    if path.direction == DECREASING:
        ends = lams + [path.terminal_lambda]
    else:
        ends = lams + [path.terminal_lambda]
    mids = []
    for a, b in zip(ends[:-1], ends[1:]):
        if a != b and np.isfinite(a) and np.isfinite(b):
            mids.append(0.5 * (a + b))
    return mids


def verify_insertion_deletion(path, tol=1e-8):
    """Sup-norm jump of the path at every knot.

    For each knot the adjacent segment formulas are evaluated at the knot's
    lambda; the first knot of a global path is compared against the zero
    solution above it. Returns (jumps, all_within_tol)."""
    jumps = []
    p = path.p
    for k, knot in enumerate(path.knots):
        lam = knot.lambda_k
        here = knot.beta(lam, p)
        if k == 0:
            if path.direction == DECREASING and not np.isfinite(path.start_lambda):
                prev = np.zeros(p)
            else:
                jumps.append(0.0)
                continue
        else:
            prev = path.knots[k - 1].beta(lam, p)
        jumps.append(float(np.max(np.abs(here - prev))))
    jumps = np.array(jumps)
    return jumps, bool(np.all(jumps <= tol))


# ---------------------------------------------------------------------------
# minimum-norm representative and local paths

def min_norm_point(XE, fit, s, tol=1e-10):
    """Minimum-l2 point of {x : XE x = fit, s_i x_i >= 0}.

    Equals the pseudoinverse point when that point already has the right
    signs; otherwise a least-distance problem is solved in null(XE)."""
    XE = as_matrix(XE)
    k = XE.shape[1]
    s = np.asarray(s, dtype=float)
    if k == 0:
        return np.zeros(0)
    fac = rank_factor(XE)
    r = fac.rank
    V, U, sv = fac.rowspace_basis, fac.range_basis, fac.singular_values[:r]
    xr = V @ ((U.T @ fit) / sv)
    scale = max(float(np.max(np.abs(xr))), 1e-300)
    if np.min(s * xr) >= -tol * scale or fac.null_basis.shape[1] == 0:
        return xr
    B = fac.null_basis
    t = least_distance(s[:, None] * B, -s * xr)
    if t is None:
        raise InputError("sign constraints are infeasible for this fit")
    x = xr + B @ t
    x[np.abs(x) <= 1e-12 * scale] = 0.0
    return x


def local_path(inst, beta_star, direction=DECREASING, lambda_stop=0.0, kkt_tol=1e-7,
               tol_eq=1e-7):
    """Path started from a known solution at inst.lam and followed toward
    lambda_stop in either direction."""
    if direction not in (DECREASING, INCREASING):
        raise InputError(f"direction must be {DECREASING!r} or {INCREASING!r}")
    X, y = inst.X, inst.y
    p = inst.p
    lam0 = inst.lam
    beta_star = as_vector(beta_star, p, "beta_star")
    rep = check_kkt(inst, beta_star, tol=kkt_tol * max(1.0, lam0))
    if not rep.passed:
        raise InputError(f"beta_star fails the KKT conditions at lambda={lam0:g} "
                         f"(gap {rep.stationarity_gap:.3g}, sign {rep.sign_violation:.3g})")
    if direction == DECREASING and not (0 <= lambda_stop <= lam0):
        raise InputError("decreasing local path needs 0 <= lambda_stop <= lambda")
    if direction == INCREASING and not (lam0 <= lambda_stop < np.inf):
        raise InputError("increasing local path needs lambda <= lambda_stop < inf")
    fit = X @ beta_star
    st = equicorrelation(inst, fit, tol_eq=tol_eq)
    E = st.members
    x_k = np.zeros(p)
    if E:
        x_k[list(E)] = min_norm_point(X[:, list(E)], fit, st.sign_vector)
    delta = -1.0 if direction == DECREASING else 1.0
    sc = _Scales(X, y)
    # choose the state on the outgoing side of lam0
    batch = [(lam0, "join", j, s) for j, s in zip(E, st.signs)]
    piece = _resolve(X, y, ((), (), ()), x_k, lam0, delta, batch, sc)
    if piece is None:
        raise CyclingError(f"no admissible path direction at lambda={lam0:g}")
    knots = [_knot(lam0, (piece.E, tuple(int(v) for v in piece.s), piece.Z),
                   piece.cp, piece.dp, "start", -1, 0)]
    history = [(lam0, piece.E, tuple(int(v) for v in piece.s), piece.Z)]
    _march(X, y, piece, lam0, delta, lambda_stop, sc, knots, history, _budget(p) + 1)
    return LassoPath(tuple(knots), float(lambda_stop), p, direction,
                     float(lam0), tuple(history))

