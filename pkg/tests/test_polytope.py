import numpy as np
import pytest
from scipy.optimize import linprog

from lassokit.errors import CapabilityError, InputError, UnsupportedError
from lassokit.instances import generate
from lassokit.kkt import ProblemInstance, check_kkt
from lassokit.larspath import lars_path, solution_at
from lassokit.polytope import (DISPENSABLE, INDISPENSABLE, active_subspace_check,
                               coefficient_bounds, enumerate_active_sets, joint_zero_feasible,
                               min_l1_least_squares, reduce_to_independent, solution_polytope,
                               uniqueness_verdict)
from oracles import face_fit, polytope_x_bounds, solution_set_bounds

DUP = ProblemInstance([[1.0, 1.0]], [2.0], 0.5)

# HiGHS over {b_E : X_E b_E = fit, s_i b_i >= 0} for averaged-column seed 3, lambda 1
SEED3_LOWER = [-0.9192135161972483, 0.4194013214133639, 0.0, 0.0]
SEED3_UPPER = [-0.9192135161972483, 0.8916553807345209, 0.4722540593211586, 0.9445081186423131]


def averaged(seed=3):
    X, y = generate("averaged-column", 5, 10, seed)
    return ProblemInstance(X, y, 1.0)


def sampled_supports(inst, spec, draws, seed):
    """Supports of HiGHS optima over K for random and coordinate objectives."""
    E, s = list(spec.members), spec.equi_state.signs
    XE = inst.X[:, E]
    fit = face_fit(inst.X, inst.y, inst.lam, E, s)
    bounds = polytope_x_bounds(s)
    rng = np.random.default_rng(seed)
    k = len(E)
    objectives = list(rng.standard_normal((draws, k)))
    objectives += [sign * row for row in np.eye(k) for sign in (1, -1)]
    out = set()
    for c in objectives:
        res = linprog(c, A_eq=XE, b_eq=fit, bounds=bounds, method="highs")
        assert res.status == 0
        out.add(tuple(E[m] for m in np.flatnonzero(np.abs(res.x) > 1e-8)))
    return out


def nonunique_cases():
    cases = []
    for seed in range(40):
        kind = ("duplicated", "averaged-column")[seed % 2]
        X, y = generate(kind, 6 + seed % 5, 8 + seed % 4, seed)
        lmax = np.max(np.abs(X.T @ y))
        for frac in (0.1, 0.4):
            inst = ProblemInstance(X, y, frac * lmax)
            if not uniqueness_verdict(inst).unique:
                cases.append(inst)
    return cases


NONUNIQUE = nonunique_cases()


class TestDuplicatedFixture:
    def test_spec(self):
        spec = solution_polytope(DUP)
        assert spec.members == (0, 1) and spec.equi_state.signs == (1, 1)
        np.testing.assert_allclose(spec.lars_point, [0.75, 0.75], atol=1e-12)
        assert spec.null_basis.shape == (2, 1)
        v = spec.null_basis[:, 0]
        assert v[0] == pytest.approx(-v[1])

    def test_bounds(self):
        rep = coefficient_bounds(solution_polytope(DUP))
        np.testing.assert_allclose(rep.lower, [0.0, 0.0], atol=1e-9)
        np.testing.assert_allclose(rep.upper, [1.5, 1.5], atol=1e-9)
        np.testing.assert_allclose(rep.lars_value, [0.75, 0.75], atol=1e-12)
        assert rep.classification == (DISPENSABLE, DISPENSABLE)
        assert rep.shared_l1_norm == pytest.approx(1.5)

    def test_joint_zero(self):
        spec = solution_polytope(DUP)
        assert not joint_zero_feasible(spec, [0, 1])
        res = joint_zero_feasible(spec, [0])
        assert res
        np.testing.assert_allclose(res.witness, [0.0, 1.5], atol=1e-12)
        empty = joint_zero_feasible(spec, [])
        assert empty and check_kkt(DUP, empty.witness).passed
        with pytest.raises(InputError):
            joint_zero_feasible(spec, [5])

    def test_enumeration(self):
        assert enumerate_active_sets(solution_polytope(DUP)) == [(0,), (1,), (0, 1)]

    def test_reduce(self):
        out = reduce_to_independent(DUP, [0.75, 0.75])
        np.testing.assert_allclose(out, [0.0, 1.5], atol=1e-15)

    def test_min_l1(self):
        b = min_l1_least_squares([[1.0, 1.0]], [2.0])
        assert np.abs(b).sum() == pytest.approx(2.0)
        assert tuple(np.round(b, 12)) in {(2.0, 0.0), (0.0, 2.0)}
        endpoint = solution_at(lars_path([[1.0, 1.0]], [2.0]), 0.0)
        np.testing.assert_allclose(endpoint, [1.0, 1.0])

    def test_subspace(self):
        assert active_subspace_check(DUP, [(0,), (1,), (0, 1)]) <= 1e-15

    def test_verdict(self):
        v = uniqueness_verdict(DUP)
        assert not v.unique and v.null_dim == 1 and v.label == "non-unique"
        assert "dim null" in v.rationale


class TestUniqueInstance:
    def setup_method(self):
        X, y = generate("gaussian", 8, 5, 0)
        self.inst = ProblemInstance(X, y, 0.2 * np.max(np.abs(X.T @ y)))
        self.spec = solution_polytope(self.inst)

    def test_point_polytope(self):
        assert self.spec.null_basis.shape[1] == 0
        rep = coefficient_bounds(self.spec)
        np.testing.assert_allclose(rep.lower, rep.lars_value, atol=1e-10)
        np.testing.assert_allclose(rep.upper, rep.lars_value, atol=1e-10)
        assert all(c == INDISPENSABLE for c in rep.classification)

    def test_single_active_set(self):
        sets = enumerate_active_sets(self.spec)
        assert sets == [self.spec.members]
        assert active_subspace_check(self.inst, sets) == 0.0

    def test_reduce_unchanged(self):
        b = solution_at(lars_path(self.inst.X, self.inst.y), self.inst.lam)
        np.testing.assert_array_equal(reduce_to_independent(self.inst, b), b)

    def test_verdict(self):
        assert uniqueness_verdict(self.inst).unique

    def test_min_l1_is_least_squares(self):
        np.testing.assert_allclose(min_l1_least_squares(self.inst.X, self.inst.y),
                                   np.linalg.lstsq(self.inst.X, self.inst.y, rcond=None)[0],
                                   atol=1e-10)

    def test_zero_response(self):
        np.testing.assert_array_equal(min_l1_least_squares(self.inst.X, np.zeros(8)),
                                      np.zeros(5))


class TestAveragedInstance:
    def test_table_structure(self):
        inst = averaged()
        spec = solution_polytope(inst)
        assert spec.members == (0, 1, 2, 3)
        assert spec.equi_state.signs == (-1, 1, 1, 1)
        rep = coefficient_bounds(spec)
        np.testing.assert_allclose(rep.lower, SEED3_LOWER, atol=1e-9)
        np.testing.assert_allclose(rep.upper, SEED3_UPPER, atol=1e-9)
        assert rep.classification == (INDISPENSABLE, INDISPENSABLE, DISPENSABLE, DISPENSABLE)
        assert not joint_zero_feasible(spec, [2, 3])
        sets = enumerate_active_sets(spec)
        assert (0, 1, 2) in sets and (0, 1, 2, 3) in sets
        assert active_subspace_check(inst, sets) <= 1e-8

    def test_reduce_from_lars_point(self):
        inst = averaged()
        b = solution_at(lars_path(inst.X, inst.y), 1.0)
        out = reduce_to_independent(inst, b)
        A = np.flatnonzero(out)
        assert A.size == 3 and np.linalg.matrix_rank(inst.X[:, A]) == 3
        np.testing.assert_allclose(inst.X @ out, inst.X @ b, atol=1e-10)
        assert np.abs(out).sum() == pytest.approx(np.abs(b).sum(), abs=1e-10)

    def test_lars_point_outside_row_space(self):
        # the pseudoinverse point has a wrong sign here, so the minimum-norm
        # solution is pushed along the null space to the sign boundary
        spec = solution_polytope(averaged(15))
        s = np.diag(spec.sign_diag)
        assert np.min(s * spec.lars_point) >= -1e-10
        assert np.linalg.norm(spec.projection @ spec.lars_point - spec.lars_point) > 1e-3
        rep = coefficient_bounds(spec)
        assert np.all(rep.lower <= rep.lars_value + 1e-10)
        assert np.all(rep.lars_value <= rep.upper + 1e-10)

    def test_lam_zero_unsupported(self):
        with pytest.raises(UnsupportedError):
            solution_polytope(averaged().with_lambda(0.0))
        with pytest.raises(UnsupportedError):
            uniqueness_verdict(averaged().with_lambda(0.0))

    def test_cap(self):
        with pytest.raises(CapabilityError):
            enumerate_active_sets(solution_polytope(averaged()), cap=3)

    def test_threads_do_not_change_results(self, monkeypatch):
        spec = solution_polytope(averaged())
        serial = coefficient_bounds(spec)
        monkeypatch.setenv("LASSOKIT_THREADS", "4")
        threaded = coefficient_bounds(spec)
        np.testing.assert_array_equal(serial.lower, threaded.lower)
        np.testing.assert_array_equal(serial.upper, threaded.upper)


@pytest.mark.parametrize("inst", NONUNIQUE[:25], ids=lambda i: f"n{i.n}p{i.p}")
def test_nonunique_properties(inst):
    spec = solution_polytope(inst)
    rep = coefficient_bounds(spec)
    E, s = spec.members, np.array(spec.equi_state.signs)
    lo, hi = solution_set_bounds(inst.X, inst.y, inst.lam, E, s)
    np.testing.assert_allclose(rep.lower, lo, atol=1e-8)
    np.testing.assert_allclose(rep.upper, hi, atol=1e-8)
    L = rep.shared_l1_norm
    for m in range(len(E)):
        assert rep.lower[m] <= rep.lars_value[m] + 1e-10 <= rep.upper[m] + 2e-10
        assert not (rep.lower[m] < -1e-9 and rep.upper[m] > 1e-9)
        span = (0.0, L) if s[m] > 0 else (-L, 0.0)
        assert span[0] - 1e-9 <= rep.lower[m] and rep.upper[m] <= span[1] + 1e-9
        for pt in (rep.lower_points[m], rep.upper_points[m]):
            assert check_kkt(inst, pt).passed
            assert np.abs(pt).sum() == pytest.approx(L, abs=1e-8)
    assert np.linalg.norm(spec.lars_point) <= min(
        np.linalg.norm(p) for p in rep.lower_points + rep.upper_points) + 1e-8
    if len(E) <= 6:
        sets = set(enumerate_active_sets(spec))
        assert sampled_supports(inst, spec, 50, inst.n) <= sets
        assert active_subspace_check(inst, sets) <= 1e-8
    b = reduce_to_independent(inst, spec.embed(spec.lars_point))
    A = np.flatnonzero(b)
    assert np.linalg.matrix_rank(inst.X[:, A]) == A.size <= min(inst.n, inst.p)


def test_nonunique_cases_exist():
    assert len(NONUNIQUE) >= 25
