"""
Application Layer: the basic method phi*.

On [x_i, x_{i+1}] the method runs r+1 approximate Picard sweeps. Each sweep
interpolates g(t) = f(t, l_{i,j}(t)) at r equidistant nodes (the single
node x_i when r = 1) and integrates the interpolant from (x_i, y_i). The
result l_{i,r+1} is a polynomial of degree <= r, obtained with exactly
r*(r+1) evaluations of f.
"""

import numpy as np

from core.exceptions import InvalidArgument
from models.interfaces import IOneStepMethod
from models.polynomials import PolynomialPiece, horner
from models.problems import IvpProblem
from models.state import UNIT_ROUNDOFF, StateVector, as_state
from services.interpolation_service import (
    antiderivative_rows,
    divided_difference_table,
    equidistant_nodes,
    newton_to_monomial,
)


def evaluate_piece(piece: PolynomialPiece, t: float) -> StateVector:
    """
    Horner evaluation of a piece at t in [x_i, x_{i+1}].

    Raises:
        OutOfRange: if t is outside the piece beyond rounding slack
    """
    return piece.evaluate(t)


def picard_sweeps(
    problem: IvpProblem, x_i: float, x_next: float, y_i: StateVector, r: int
) -> PolynomialPiece:
    y = as_state(y_i)
    nodes = equidistant_nodes(x_i, x_next, r)
    shifts = nodes - x_i
    rows = y.reshape(1, -1)

    # iterates stay raw coefficient rows around x_i; one piece per step
    for _ in range(r + 1):
        g = np.array([problem.evaluate(t_k, horner(rows, s_k)) for t_k, s_k in zip(nodes, shifts)])
        q = newton_to_monomial(nodes, divided_difference_table(nodes, g), x_i)
        rows = antiderivative_rows(q, y)

    return PolynomialPiece(origin=x_i, end=x_next, coefficients=rows)


def observed_order(r: int) -> int:
    """
    Global order phi* of order r shows on smooth problems: r, or r + 1 for
    odd r >= 3, where the symmetric node set integrates one degree beyond
    the interpolant.
    """
    return r + 1 if r >= 3 and r % 2 == 1 else r


def picard_local_step(
    problem: IvpProblem, x_i: float, y_i: StateVector, h: float, r: int
) -> PolynomialPiece:
    """
    One step of phi* of length h from (x_i, y_i).

    Raises:
        InvalidArgument: if r < 1, h <= 0 or the step overshoots b
        DomainViolation: if f rejects an argument or returns a non-finite value
    """
    if r < 1:
        raise InvalidArgument(f"order must be >= 1, got {r}")
    if not h > 0.0 or not np.isfinite(h):
        raise InvalidArgument(f"step must be positive and finite, got {h}")
    x_next = x_i + h
    slack = 10.0 * UNIT_ROUNDOFF * (problem.b - problem.a)
    if x_next > problem.b + slack:
        raise InvalidArgument(f"step from {x_i} of length {h} overshoots b={problem.b}")
    return picard_sweeps(problem, x_i, x_next, y_i, r)


class PicardMethod(IOneStepMethod):
    """
    phi* wrapped for the general controller. bar_beta is 2, read off the
    leading factor of the local error bound of the approximate Picard
    iteration.
    """

    def __init__(self, order: int, bar_beta: float = 2.0):
        if order < 1:
            raise InvalidArgument(f"order must be >= 1, got {order}")
        self._order = order
        self._bar_beta = bar_beta

    def __repr__(self) -> str:
        return f"PicardMethod(order={self._order})"

    @property
    def order(self) -> int:
        return self._order

    @property
    def bar_beta(self) -> float:
        return self._bar_beta

    @property
    def cost_per_step(self) -> int:
        return self._order * (self._order + 1)

    def step(
        self, problem: IvpProblem, x_i: float, x_next: float, y_i: StateVector
    ) -> PolynomialPiece:
        return picard_sweeps(problem, x_i, x_next, y_i, self._order)
