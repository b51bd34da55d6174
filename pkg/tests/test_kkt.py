import numpy as np
import pytest

from lassokit.errors import CapabilityError, InconsistencyError, InputError, UnsupportedError
from lassokit.instances import generate
from lassokit.kkt import (EquiState, ProblemInstance, check_kkt, equicorrelation,
                          general_position_check, lasso_objective, support_of)
from lassokit.solvers import coordinate_descent
from oracles import lasso_lbfgs

IDENT = ProblemInstance(np.eye(2), [2.0, 1.0], 0.5)


class TestTypes:
    def test_instance_validation(self):
        with pytest.raises(InputError):
            ProblemInstance(np.eye(2), [1.0], 0.1)
        with pytest.raises(InputError):
            ProblemInstance(np.eye(2), [1.0, 1.0], -1.0)
        with pytest.raises(InputError):
            ProblemInstance(np.zeros((0, 2)), [], 0.1)
        with pytest.raises(InputError):
            ProblemInstance([[np.inf, 1.0]], [1.0], 0.1)

    def test_equistate_validation(self):
        with pytest.raises(InputError):
            EquiState((2, 1), (1, 1))
        with pytest.raises(InputError):
            EquiState((1,), (0,))
        with pytest.raises(InputError):
            EquiState((1, 2), (1,))
        assert len(EquiState((0, 3), (1, -1), 0.5)) == 2


class TestObjective:
    def test_zero_beta(self):
        assert lasso_objective(IDENT, [0.0, 0.0]) == pytest.approx(2.5)

    def test_hand_value_and_grid_minimum(self):
        assert lasso_objective(IDENT, [1.5, 0.5]) == pytest.approx(1.25)
        grid = np.linspace(0.0, 2.5, 251)
        vals = [lasso_objective(IDENT, [a, b]) for a in grid[::5] for b in grid[::5]]
        assert min(vals) >= 1.25 - 1e-12

    def test_lambda_zero(self):
        inst = IDENT.with_lambda(0.0)
        assert lasso_objective(inst, [1.0, 1.0]) == pytest.approx(0.5)

    def test_dimension(self):
        with pytest.raises(InputError):
            lasso_objective(IDENT, [1.0])


class TestCheckKkt:
    def test_zero_above_lambda_max(self):
        inst = IDENT.with_lambda(2.0)
        assert check_kkt(inst, [0.0, 0.0]).passed

    def test_optimum_passes_perturbation_fails(self):
        rep = check_kkt(IDENT, [1.5, 0.5])
        assert rep.passed and rep.stationarity_gap <= 1e-15
        assert rep.equi_state.members == (0, 1)
        assert not check_kkt(IDENT, [1.6, 0.5]).passed

    def test_sign_violation_reported(self):
        rep = check_kkt(IDENT.with_lambda(1.5), [-0.5, 0.0])
        assert rep.sign_violation > 1.0 and not rep.passed

    def test_lambda_zero_unsupported(self):
        with pytest.raises(UnsupportedError):
            check_kkt(IDENT.with_lambda(0.0), [2.0, 1.0])

    def test_support_subset_of_equicorrelation(self):
        X, y = generate("duplicated", 8, 10, 3)
        inst = ProblemInstance(X, y, 0.3 * np.max(np.abs(X.T @ y)))
        b = coordinate_descent(inst).solution
        rep = check_kkt(inst, b)
        assert rep.passed
        assert set(rep.support) <= set(rep.equi_state.members)

    def test_support_of(self):
        np.testing.assert_array_equal(support_of([1.0, 1e-14, -2.0]), [0, 2])
        assert support_of([0.0, 0.0]).size == 0


class TestEquicorrelation:
    def test_soft_threshold_examples(self):
        st = equicorrelation(IDENT, [1.5, 0.5])
        assert st.members == (0, 1) and st.signs == (1, 1)
        st = equicorrelation(IDENT.with_lambda(1.5), [0.5, 0.0])
        assert st.members == (0,) and st.signs == (1,)

    def test_empty_above_lambda_max(self):
        assert len(equicorrelation(IDENT.with_lambda(3.0), [0.0, 0.0])) == 0

    def test_inconsistent_fit(self):
        with pytest.raises(InconsistencyError):
            equicorrelation(IDENT.with_lambda(3.0), [0.1, 0.0])

    def test_same_from_different_solutions(self):
        X, y = generate("averaged-column", 6, 8, 11)
        inst = ProblemInstance(X, y, 0.2 * np.max(np.abs(X.T @ y)))
        b1 = coordinate_descent(inst, tol=1e-12).solution
        b2 = coordinate_descent(inst, tol=1e-12, beta0=np.arange(8.0)).solution
        b3 = lasso_lbfgs(X, y, inst.lam)
        s1 = equicorrelation(inst, X @ b1)
        assert equicorrelation(inst, X @ b2) == s1
        assert equicorrelation(inst, X @ b3, tol_eq=1e-6) == s1


class TestGeneralPosition:
    def test_duplicated_pair(self):
        X = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 0.0]])
        res = general_position_check(X)
        assert not res
        assert set(res.witness["indices"]) == {0, 2}

    def test_identity(self):
        assert general_position_check(np.eye(3))

    def test_averaged(self):
        rng = np.random.default_rng(0)
        X = rng.standard_normal((5, 4))
        X[:, 3] = 0.5 * (X[:, 1] + X[:, 2])
        res = general_position_check(X)
        assert not res
        assert res.witness["indices"] == (1, 2, 3)

    def test_gaussian_always_in_general_position(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            n = int(rng.integers(2, 6))
            p = int(rng.integers(2, 9))
            assert general_position_check(rng.standard_normal((n, p)))

    def test_capability(self):
        with pytest.raises(CapabilityError):
            general_position_check(np.zeros((2, 13)))
