"""
Application Layer: true error measurement.

Local errors are measured against an oracle for the local problem
z' = f, z(x_i) = y_i. Problems without a closed form get a reference
integrator: phi* of a higher order on uniform substeps, refined by halving
until two successive answers agree.
"""

import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from core.exceptions import DomainViolation, InvalidArgument, OracleFailure
from helpers.logging_helper import logger
from models.interfaces import ILocalSolutionOracle
from models.models import Trajectory
from models.problems import IvpProblem
from models.state import UNIT_ROUNDOFF, StateVector, as_state, norm_max
from services.picard_service import picard_sweeps

MAX_HALVINGS = 24
INTERIOR_SAMPLES = 8


def _integrate_uniform(
    problem: IvpProblem, x: float, y: StateVector, t: float, substeps: int, order: int
) -> StateVector:
    state = as_state(y)
    width = (t - x) / substeps
    for k in range(substeps):
        start = x + k * width
        end = t if k == substeps - 1 else x + (k + 1) * width
        state = as_state(picard_sweeps(problem, start, end, state, order).evaluate(end))
    return state


def reference_local_solution(
    problem: IvpProblem,
    x: float,
    y: StateVector,
    t: float,
    tol: float,
    order: int = 2,
) -> StateVector:
    """
    Local solution through (x, y) at t by successive halving.

    Integrates with phi* of order min(order + 2, 6) on 1, 2, 4, ... uniform
    substeps and returns the finer of the first two answers that agree
    within tol/4 in the max norm.

    Raises:
        InvalidArgument: if tol <= 0 or t is outside [x, b]
        OracleFailure: if no agreement is reached after 24 halvings
    """
    if not tol > 0.0:
        raise InvalidArgument(f"tol must be positive, got {tol}")
    slack = 10.0 * UNIT_ROUNDOFF * (problem.b - problem.a)
    if t < x - slack or t > problem.b + slack:
        raise InvalidArgument(f"need x <= t <= b, got x={x}, t={t}, b={problem.b}")
    y = as_state(y)
    if t <= x:
        return y.copy()

    reference_order = min(order + 2, 6)
    local = IvpProblem(problem.rhs, x, t, y, name=f"{problem.name}:local")
    previous: Optional[StateVector] = None
    for halvings in range(MAX_HALVINGS + 1):
        try:
            current = _integrate_uniform(local, x, y, t, 2**halvings, reference_order)
        except DomainViolation:
            # coarse substeps may leave the domain of f; refine and retry
            previous = None
            continue
        if previous is not None and norm_max(current - previous) <= tol / 4.0:
            return current
        previous = current

    logger.error(f"Reference integrator for '{problem.name}' did not converge from x={x!r} to t={t!r}")
    raise OracleFailure(
        f"reference solution on [{x!r}, {t!r}] did not reach tol={tol:g} after {MAX_HALVINGS} halvings"
    )


class ReferenceIntegratorOracle(ILocalSolutionOracle):
    """Local-solution oracle for problems without a closed form."""

    def __init__(self, problem: IvpProblem, tol: float = 1e-12, order: int = 2):
        self.problem = problem
        self.tol = tol
        self.order = order

    @property
    def provenance(self) -> str:
        return "reference_integrator"

    def solve(self, x: float, y: StateVector, t: float) -> StateVector:
        return reference_local_solution(self.problem, x, y, t, self.tol, self.order)


def per_step_local_errors(
    trajectory: Trajectory, oracle: ILocalSolutionOracle, sample_interior: bool = False
) -> List[float]:
    """
    Local error of every step: ||z_i(x_{i+1}) - y_{i+1}|| where z_i starts at
    (x_i, y_i). With sample_interior the piece is also compared with z_i at 8
    interior points.
    """
    errors: List[float] = []
    for record, piece in zip(trajectory.steps, trajectory.pieces):
        exact = oracle.solve(record.x, record.y, record.x_next)
        error = norm_max(np.asarray(exact) - np.asarray(record.y_next))
        if sample_interior:
            width = record.x_next - record.x
            for k in range(1, INTERIOR_SAMPLES + 1):
                t = record.x + k * width / (INTERIOR_SAMPLES + 1)
                error = max(error, norm_max(oracle.solve(record.x, record.y, t) - piece.evaluate(t)))
        errors.append(error)
    return errors


def max_local_error(
    trajectory: Trajectory, oracle: ILocalSolutionOracle, sample_interior: bool = False
) -> float:
    """
    MAXERR: the largest per-step endpoint local error of a trajectory.

    Raises:
        OracleFailure: propagated from the oracle
    """
    errors = per_step_local_errors(trajectory, oracle, sample_interior)
    return max(errors, default=0.0)


def global_endpoint_error(trajectory: Trajectory, oracle: ILocalSolutionOracle) -> float:
    """||z(b) - y_m|| for the solution z through the trajectory's initial point."""
    if not trajectory.steps:
        return 0.0
    first, last = trajectory.steps[0], trajectory.steps[-1]
    exact = oracle.solve(first.x, first.y, last.x_next)
    return norm_max(np.asarray(exact) - np.asarray(last.y_next))


def empirical_order(samples: Sequence[Tuple[float, float]]) -> float:
    """
    Least-squares slope of log(error) against log(scale). Points with a
    non-positive scale or error are dropped.

    Raises:
        InvalidArgument: if fewer than 3 usable points remain
    """
    usable = [
        (scale, error)
        for scale, error in samples
        if scale > 0.0 and error > 0.0 and math.isfinite(scale) and math.isfinite(error)
    ]
    if len(usable) < 3:
        raise InvalidArgument(f"need at least 3 positive (scale, error) points, got {len(usable)}")
    log_scale = np.log([scale for scale, _ in usable])
    log_error = np.log([error for _, error in usable])
    slope, _ = np.polyfit(log_scale, log_error, 1)
    return float(slope)
