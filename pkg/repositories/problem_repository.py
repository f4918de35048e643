"""
Infrastructure Layer: Problem Repository

In-memory registry of initial value problems with closed-form local
solutions z_{x,y}(t). Every lookup builds a fresh IvpProblem so evaluation
counters are never shared between solves.
"""

import math
from typing import Callable, Dict, List, Tuple

import numpy as np

from core.exceptions import DomainViolation, InvalidArgument, OracleFailure, PicardMeshError
from helpers.logging_helper import logger
from models.interfaces import ILocalSolutionOracle, IProblemRepository
from models.problems import IvpProblem, RegistryProblem
from models.state import UNIT_ROUNDOFF, StateVector

LocalSolution = Callable[[float, StateVector, float], object]


class ClosedFormOracle(ILocalSolutionOracle):
    """Oracle backed by an explicit formula for the local solution."""

    def __init__(self, solution: LocalSolution, name: str):
        self.solution = solution
        self.name = name

    @property
    def provenance(self) -> str:
        return "closed_form"

    def solve(self, x: float, y: StateVector, t: float) -> StateVector:
        if t < x - 10.0 * UNIT_ROUNDOFF * max(1.0, abs(x)):
            raise OracleFailure(f"oracle '{self.name}' asked for t={t!r} before x={x!r}")
        state = np.asarray(y, dtype=np.float64).reshape(-1)
        try:
            with np.errstate(all="ignore"):
                value = np.asarray(self.solution(x, state, t), dtype=np.float64).reshape(-1)
        except PicardMeshError:
            raise
        except (ArithmeticError, ValueError) as e:
            raise OracleFailure(f"oracle '{self.name}' failed at x={x!r} t={t!r}: {e}") from e
        if value.shape != state.shape or not np.all(np.isfinite(value)):
            raise OracleFailure(
                f"oracle '{self.name}' produced {value.tolist()} at x={x!r} t={t!r}"
            )
        return value


# test problem: z' = (3/4)(z - 1)^(-3/2) on [0, 1], z(0) = 1 + delta


def _test_rhs(t: float, y: StateVector) -> StateVector:
    if not y[0] > 1.0:
        raise DomainViolation("test problem needs y > 1", t, y)
    return np.array([0.75 * (y[0] - 1.0) ** -1.5])


def _test_solution(x: float, y: StateVector, t: float) -> StateVector:
    if not y[0] > 1.0:
        raise OracleFailure(f"test problem oracle needs y > 1, got {y[0]!r}")
    return np.array([(1.875 * (t - x) + (y[0] - 1.0) ** 2.5) ** 0.4 + 1.0])


def make_test_problem(delta: float = 0.1) -> RegistryProblem:
    """
    The singular test problem with eta = 1 + delta; small delta puts the
    start close to the singularity of f at y = 1.

    Raises:
        InvalidArgument: if delta <= 0
    """
    if not (delta > 0.0 and math.isfinite(delta)):
        raise InvalidArgument(f"delta must be positive, got {delta}")
    return RegistryProblem(
        identifier="test",
        problem=IvpProblem(_test_rhs, 0.0, 1.0, [1.0 + delta], name=f"test(delta={delta:g})"),
        oracle=ClosedFormOracle(_test_solution, "test"),
        smoothness_note="smooth for y > 1; f and its derivatives blow up as y -> 1",
        params={"delta": delta},
    )


def make_exp_problem(lam: float = 1.0) -> RegistryProblem:
    def rhs(t: float, y: StateVector) -> StateVector:
        return lam * y

    def solution(x: float, y: StateVector, t: float) -> StateVector:
        return y * math.exp(lam * (t - x))

    return RegistryProblem(
        identifier="exp",
        problem=IvpProblem(rhs, 0.0, 1.0, [1.0], name=f"exp(lam={lam:g})"),
        oracle=ClosedFormOracle(solution, "exp"),
        smoothness_note="entire",
        params={"lam": lam},
    )


def _rotation_rhs(t: float, y: StateVector) -> StateVector:
    return np.array([-y[1], y[0]])


def _rotation_solution(x: float, y: StateVector, t: float) -> StateVector:
    c, s = math.cos(t - x), math.sin(t - x)
    return np.array([c * y[0] - s * y[1], s * y[0] + c * y[1]])


def make_rotation_problem() -> RegistryProblem:
    return RegistryProblem(
        identifier="rotation",
        problem=IvpProblem(_rotation_rhs, 0.0, 2.0, [1.0, 0.0], name="rotation"),
        oracle=ClosedFormOracle(_rotation_solution, "rotation"),
        smoothness_note="linear, entire",
    )


def _logistic_rhs(t: float, y: StateVector) -> StateVector:
    return y * (1.0 - y)


def _logistic_solution(x: float, y: StateVector, t: float) -> StateVector:
    decay = math.exp(-(t - x))
    return y / (y + (1.0 - y) * decay)


def make_logistic_problem() -> RegistryProblem:
    return RegistryProblem(
        identifier="logistic",
        problem=IvpProblem(_logistic_rhs, 0.0, 2.0, [0.5], name="logistic"),
        oracle=ClosedFormOracle(_logistic_solution, "logistic"),
        smoothness_note="polynomial rhs; solution smooth for 0 < y < 1",
    )


def make_zero_problem() -> RegistryProblem:
    return RegistryProblem(
        identifier="zero",
        problem=IvpProblem(lambda t, y: np.zeros_like(y), 0.0, 1.0, [1.0], name="zero"),
        oracle=ClosedFormOracle(lambda x, y, t: y.copy(), "zero"),
        smoothness_note="f = 0",
    )


class ProblemRegistry(IProblemRepository):
    """
    Registry keyed by identifier. Parameters are passed as keyword
    arguments; each builder declares which ones it accepts.
    """

    def __init__(self):
        self._builders: Dict[str, Tuple[Callable[..., RegistryProblem], Tuple[str, ...]]] = {
            "test": (make_test_problem, ("delta",)),
            "exp": (make_exp_problem, ("lam",)),
            "rotation": (make_rotation_problem, ()),
            "logistic": (make_logistic_problem, ()),
            "zero": (make_zero_problem, ()),
        }

    def identifiers(self) -> List[str]:
        return list(self._builders)

    def get(self, identifier: str, **params: float) -> RegistryProblem:
        """
        Build a fresh registry problem.

        Raises:
            InvalidArgument: for unknown identifiers or parameters
        """
        if identifier not in self._builders:
            logger.error(f"Unknown problem '{identifier}'")
            raise InvalidArgument(
                f"unknown problem '{identifier}', expected one of {self.identifiers()}"
            )
        builder, accepted = self._builders[identifier]
        given = {k: v for k, v in params.items() if v is not None}
        unexpected = sorted(set(given) - set(accepted))
        if unexpected:
            raise InvalidArgument(f"problem '{identifier}' takes no parameter(s) {unexpected}")
        return builder(**{k: float(v) for k, v in given.items()})

    def all(self) -> List[RegistryProblem]:
        problems = [self.get(identifier) for identifier in self.identifiers()]
        problems.append(self.get("exp", lam=-1.0))
        return problems


def registry() -> List[RegistryProblem]:
    """One instance of every registry problem with default parameters, plus exp with lam = -1."""
    return ProblemRegistry().all()
