import math

import mpmath
import numpy as np
import pytest

from core.exceptions import DomainViolation, InvalidArgument, OracleFailure
from models.models import OrderCheckMode
from repositories.problem_repository import ClosedFormOracle, make_test_problem, registry
from services import error_measurement_service
from services.error_measurement_service import (
    ReferenceIntegratorOracle,
    empirical_order,
    global_endpoint_error,
    max_local_error,
    per_step_local_errors,
    reference_local_solution,
)
from services.experiment_service import ExperimentService
from services.mesh_control_service import fixed_mesh_solve, uniform_mesh
from services.picard_service import PicardMethod


# ============================================================
# Problem registry
# ============================================================
class TestProblemRegistry:
    def test_identifiers(self, problem_registry):
        assert problem_registry.identifiers() == ["test", "exp", "rotation", "logistic", "zero"]

    def test_all_includes_decaying_exp(self, problem_registry):
        labels = [entry.label for entry in problem_registry.all()]
        assert labels == ["test(delta=0.1)", "exp(lam=1)", "rotation", "logistic", "zero", "exp(lam=-1)"]

    def test_module_level_registry(self):
        entries = registry()
        assert len(entries) == 6
        assert all(entry.problem.eval_count == 0 for entry in entries)

    def test_lookups_are_fresh(self, problem_registry):
        first = problem_registry.get("exp")
        first.problem.evaluate(0.0, first.problem.eta)
        assert problem_registry.get("exp").problem.eval_count == 0

    def test_unknown_problem(self, problem_registry):
        with pytest.raises(InvalidArgument):
            problem_registry.get("vanderpol")

    def test_unknown_parameter(self, problem_registry):
        with pytest.raises(InvalidArgument):
            problem_registry.get("rotation", lam=2.0)

    def test_missing_parameters_use_defaults(self, problem_registry):
        entry = problem_registry.get("test", delta=None)
        assert entry.params == {"delta": 0.1}
        assert entry.problem.eta.tolist() == [1.1]

    @pytest.mark.parametrize("delta", [0.0, -0.1, float("nan")])
    def test_test_problem_needs_positive_delta(self, delta):
        with pytest.raises(InvalidArgument):
            make_test_problem(delta)

    def test_test_problem_domain(self, test_problem_entry):
        problem = test_problem_entry.problem
        with pytest.raises(DomainViolation):
            problem.evaluate(0.0, np.array([1.0]))
        with pytest.raises(OracleFailure):
            test_problem_entry.oracle.solve(0.0, np.array([0.9]), 0.5)


# ============================================================
# Closed-form oracles
# ============================================================
class TestClosedFormOracles:
    def test_provenance(self, problem_registry):
        assert {entry.oracle.provenance for entry in problem_registry.all()} == {"closed_form"}

    def test_identity_at_the_start(self, problem_registry):
        for entry in problem_registry.all():
            problem = entry.problem
            np.testing.assert_allclose(entry.oracle.solve(problem.a, problem.eta, problem.a), problem.eta, rtol=1e-14)

    def test_semigroup(self, problem_registry):
        """Rule: restarting from z(s) lands on the same z(t), for random x <= s <= t."""
        rng = np.random.default_rng(23)
        for entry in problem_registry.all():
            problem, oracle = entry.problem, entry.oracle
            for _ in range(100):
                x, s, t = np.sort(rng.uniform(problem.a, problem.b, size=3)).tolist()
                y = oracle.solve(problem.a, problem.eta, x)
                np.testing.assert_allclose(
                    oracle.solve(s, oracle.solve(x, y, s), t),
                    oracle.solve(x, y, t),
                    rtol=1e-12,
                    atol=1e-14,
                    err_msg=entry.label,
                )

    def test_solves_the_ode(self, problem_registry):
        """Rule: central differences of the oracle match f along the solution."""
        step = 1e-5
        for entry in problem_registry.all():
            problem, oracle = entry.problem, entry.oracle
            t = problem.a + 0.5 * (problem.b - problem.a)
            forward = oracle.solve(problem.a, problem.eta, t + step)
            backward = oracle.solve(problem.a, problem.eta, t - step)
            derivative = (forward - backward) / (2 * step)
            expected = np.asarray(problem.rhs(t, oracle.solve(problem.a, problem.eta, t)))
            np.testing.assert_allclose(derivative, expected, rtol=1e-6, atol=1e-9, err_msg=entry.label)

    def test_test_problem_endpoint(self, test_problem_entry):
        with mpmath.workdps(30):
            exact = float((mpmath.mpf("1.875") + mpmath.mpf("0.1") ** 2.5) ** mpmath.mpf("0.4") + 1)
        value = test_problem_entry.oracle.solve(0.0, np.array([1.1]), 1.0)
        assert value[0] == pytest.approx(exact, rel=1e-14)

    def test_rotation_preserves_length(self, problem_registry):
        entry = problem_registry.get("rotation")
        for t in (0.3, 1.0, 2.0):
            assert np.linalg.norm(entry.oracle.solve(0.0, entry.problem.eta, t)) == pytest.approx(1.0, rel=1e-14)

    def test_logistic_is_the_sigmoid(self, problem_registry):
        entry = problem_registry.get("logistic")
        for t in (0.5, 1.0, 2.0):
            assert entry.oracle.solve(0.0, np.array([0.5]), t)[0] == pytest.approx(1.0 / (1.0 + math.exp(-t)), rel=1e-14)

    def test_refuses_to_integrate_backwards(self, problem_registry):
        with pytest.raises(OracleFailure):
            problem_registry.get("exp").oracle.solve(0.5, np.array([1.0]), 0.1)

    def test_formula_errors_become_oracle_failures(self):
        oracle = ClosedFormOracle(lambda x, y, t: y / 0.0, "broken")
        with pytest.raises(OracleFailure):
            oracle.solve(0.0, np.array([1.0]), 1.0)


# ============================================================
# Reference integrator
# ============================================================
class TestReferenceIntegrator:
    def test_zero_rhs(self, zero_problem):
        assert reference_local_solution(zero_problem, 0.0, [2.0], 1.0, 1e-12).tolist() == [2.0]

    def test_same_point(self, exp_problem):
        assert reference_local_solution(exp_problem, 0.4, [3.0], 0.4, 1e-12).tolist() == [3.0]

    def test_exp(self, exp_problem):
        value = reference_local_solution(exp_problem, 0.0, [1.0], 1.0, 1e-12)
        assert abs(value[0] - math.e) < 1e-10

    def test_agrees_with_the_closed_form(self, test_problem_entry):
        """Rule: random local queries on the test problem match its closed form within tol."""
        tol = 1e-10
        problem, oracle = test_problem_entry.problem, test_problem_entry.oracle
        reference = ReferenceIntegratorOracle(problem, tol=tol)
        assert reference.provenance == "reference_integrator"
        rng = np.random.default_rng(41)
        for _ in range(100):
            x, t = np.sort(rng.uniform(problem.a, problem.b, size=2)).tolist()
            y = oracle.solve(problem.a, problem.eta, x)
            assert y[0] - 1.0 >= 0.05
            np.testing.assert_allclose(reference.solve(x, y, t), oracle.solve(x, y, t), rtol=0.0, atol=tol)

    def test_does_not_touch_the_problem_counter(self, exp_problem):
        reference_local_solution(exp_problem, 0.0, [1.0], 0.5, 1e-10)
        assert exp_problem.eval_count == 0

    def test_invalid_requests(self, exp_problem):
        with pytest.raises(InvalidArgument):
            reference_local_solution(exp_problem, 0.0, [1.0], 0.5, 0.0)
        with pytest.raises(InvalidArgument):
            reference_local_solution(exp_problem, 0.5, [1.0], 1.5, 1e-10)

    def test_unreachable_tolerance(self, exp_problem, monkeypatch):
        monkeypatch.setattr(error_measurement_service, "MAX_HALVINGS", 3)
        with pytest.raises(OracleFailure):
            reference_local_solution(exp_problem, 0.0, [1.0], 1.0, 1e-300)


# ============================================================
# Error measures
# ============================================================
class TestErrorMeasures:
    def test_one_euler_step(self, problem_registry):
        entry = problem_registry.get("exp")
        trajectory = fixed_mesh_solve(PicardMethod(1), entry.problem, [0.0, 0.1, 1.0])
        errors = per_step_local_errors(trajectory, entry.oracle)
        assert errors[0] == pytest.approx(math.exp(0.1) - 1.1, rel=1e-12)
        assert max_local_error(trajectory, entry.oracle) == max(errors)

    def test_interior_samples_never_lower_the_error(self, problem_registry):
        entry = problem_registry.get("logistic")
        trajectory = fixed_mesh_solve(PicardMethod(2), entry.problem, uniform_mesh(0.0, 2.0, 16))
        endpoint = max_local_error(trajectory, entry.oracle)
        sampled = max_local_error(trajectory, entry.oracle, sample_interior=True)
        assert sampled >= endpoint

    def test_global_endpoint_error(self, problem_registry):
        entry = problem_registry.get("exp")
        trajectory = fixed_mesh_solve(PicardMethod(1), entry.problem, [0.0, 1.0])
        assert global_endpoint_error(trajectory, entry.oracle) == pytest.approx(math.e - 2.0, rel=1e-14)

    def test_zero_problem_has_no_error(self, problem_registry):
        entry = problem_registry.get("zero")
        trajectory = fixed_mesh_solve(PicardMethod(3), entry.problem, uniform_mesh(0.0, 1.0, 5))
        assert max_local_error(trajectory, entry.oracle) == 0.0
        assert global_endpoint_error(trajectory, entry.oracle) == 0.0


class TestEmpiricalOrder:
    def test_exact_power_laws(self):
        scales = [0.1, 0.05, 0.025, 0.0125]
        assert empirical_order([(h, h**2) for h in scales]) == pytest.approx(2.0, abs=1e-12)
        assert empirical_order([(h, 3.0 * h**3) for h in scales]) == pytest.approx(3.0, abs=1e-12)
        assert empirical_order([(1.0 / e, e**-0.5) for e in (1e-2, 1e-4, 1e-6)]) == pytest.approx(0.5, abs=1e-12)

    def test_non_positive_points_are_dropped(self):
        samples = [(0.1, 0.01), (0.05, 0.0025), (0.025, 0.000625), (0.0125, 0.0)]
        assert empirical_order(samples) == pytest.approx(2.0, abs=1e-12)

    def test_needs_three_points(self):
        with pytest.raises(InvalidArgument):
            empirical_order([(0.1, 0.01), (0.05, 0.0025)])
        with pytest.raises(InvalidArgument):
            empirical_order([(0.1, 0.0), (0.05, 0.0), (0.025, 0.0)])

    @pytest.mark.parametrize("order, slope", [(1, 1), (2, 2), (3, 4)])
    def test_global_order_on_uniform_meshes(self, problem_registry, order, slope):
        """Rule: global order r, one more for odd r >= 3."""
        (fit,) = ExperimentService(problem_registry).order_check(
            "exp", {}, [order], OrderCheckMode.GLOBAL, m_list=[16, 32, 64, 128, 256]
        )
        assert fit.slope == pytest.approx(slope, abs=0.25)
        assert fit.expected == slope
        assert fit.n_points == 5
