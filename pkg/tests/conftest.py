import numpy as np
import pytest

from models.models import AuxStepRule, CoefficientPreset, SolverConfig
from models.problems import IvpProblem
from repositories.problem_repository import ProblemRegistry, make_test_problem


@pytest.fixture
def problem_registry():
    """A fresh registry; every lookup builds uncounted problems."""
    return ProblemRegistry()


@pytest.fixture
def test_problem_entry():
    """The singular test problem with delta = 0.1."""
    return make_test_problem(0.1)


@pytest.fixture
def zero_problem():
    return IvpProblem(lambda t, y: np.zeros_like(y), 0.0, 1.0, [1.0], name="zero")


@pytest.fixture
def exp_problem():
    return IvpProblem(lambda t, y: y, 0.0, 1.0, [1.0], name="exp")


@pytest.fixture
def experiment_config():
    """Build configs with the table defaults (experiment preset, roundoff_power rule)."""

    def build(epsilon: float, order: int = 1, **overrides) -> SolverConfig:
        fields = dict(
            epsilon=epsilon,
            order=order,
            coefficient_preset=CoefficientPreset.EXPERIMENT,
            aux_step_rule=AuxStepRule.ROUNDOFF_POWER,
        )
        fields.update(overrides)
        return SolverConfig(**fields)

    return build


@pytest.fixture
def theory_config():
    """Build configs with the theory preset, beta = 1 and varphi = 1/2."""

    def build(epsilon: float, order: int = 1, **overrides) -> SolverConfig:
        fields = dict(
            epsilon=epsilon,
            order=order,
            beta=1.0,
            varphi=0.5,
            coefficient_preset=CoefficientPreset.THEORY,
        )
        fields.update(overrides)
        return SolverConfig(**fields)

    return build
