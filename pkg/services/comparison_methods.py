"""
Application Layer: one-step methods other than phi* for the general
controller. Both satisfy the IOneStepMethod contract; neither spends rhs
evaluations inside its steps.
"""

import math

import numpy as np

from core.exceptions import InvalidArgument, OutOfRange
from models.interfaces import IDenseApproximation, ILocalSolutionOracle, IOneStepMethod
from models.polynomials import PolynomialPiece
from models.problems import IvpProblem
from models.state import UNIT_ROUNDOFF, StateVector, as_state


class OracleArc(IDenseApproximation):
    """The exact local solution through (start, y) restricted to [start, end]."""

    def __init__(self, oracle: ILocalSolutionOracle, start: float, end: float, y: StateVector):
        if not start < end:
            raise InvalidArgument(f"arc needs start < end, got [{start}, {end}]")
        self.oracle = oracle
        self.start = start
        self.end = end
        self.y = as_state(y)

    def interval(self) -> tuple[float, float]:
        return self.start, self.end

    def evaluate(self, t: float) -> StateVector:
        slack = 10.0 * UNIT_ROUNDOFF * max(self.end - self.start, abs(self.end), abs(self.start))
        if t < self.start - slack or t > self.end + slack:
            raise OutOfRange(t, self.start, self.end)
        if t <= self.start:
            return self.y.copy()
        return as_state(self.oracle.solve(self.start, self.y, t))


class ExactSolutionMethod(IOneStepMethod):
    """
    Steps with the exact local solution. The controller still estimates G_i
    from f, so the mesh obeys the step equation while every local error is 0.
    """

    def __init__(self, oracle: ILocalSolutionOracle, order: int, bar_beta: float = 2.0):
        if order < 1:
            raise InvalidArgument(f"order must be >= 1, got {order}")
        self.oracle = oracle
        self._order = order
        self._bar_beta = bar_beta

    def __repr__(self) -> str:
        return f"ExactSolutionMethod(order={self._order})"

    @property
    def order(self) -> int:
        return self._order

    @property
    def bar_beta(self) -> float:
        return self._bar_beta

    @property
    def cost_per_step(self) -> int:
        return 0

    def step(self, problem: IvpProblem, x_i: float, x_next: float, y_i: StateVector) -> OracleArc:
        return OracleArc(self.oracle, x_i, x_next, y_i)


class LinearTaylorMethod(IOneStepMethod):
    """
    Degree-r Taylor polynomial for z' = lam*z: coefficient k is y_i*lam^k/k!.

    The remainder is |z^{(r+1)}| h^{r+1}/(r+1)!, below the contract bound
    with bar_beta = 1.
    """

    def __init__(self, lam: float, order: int, bar_beta: float = 1.0):
        if order < 1:
            raise InvalidArgument(f"order must be >= 1, got {order}")
        self.lam = float(lam)
        self._order = order
        self._bar_beta = bar_beta

    def __repr__(self) -> str:
        return f"LinearTaylorMethod(lam={self.lam:g}, order={self._order})"

    @property
    def order(self) -> int:
        return self._order

    @property
    def bar_beta(self) -> float:
        return self._bar_beta

    @property
    def cost_per_step(self) -> int:
        return 0

    def step(
        self, problem: IvpProblem, x_i: float, x_next: float, y_i: StateVector
    ) -> PolynomialPiece:
        y = as_state(y_i)
        scales = np.array(
            [self.lam**k / math.factorial(k) for k in range(self._order + 1)], dtype=np.float64
        )
        coefficients = scales.reshape(-1, 1) * y.reshape(1, -1)
        return PolynomialPiece(origin=x_i, end=x_next, coefficients=coefficients)
