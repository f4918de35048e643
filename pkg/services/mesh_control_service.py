"""
Application Layer: adaptive mesh selection.

ADAPT-MESH picks each mesh point from a computable local coefficient G_i:
build an auxiliary approximation on [x_i, bar_x], take the order-r divided
difference of t -> f(t, l_bar(t)) over r+1 equidistant nodes, turn it into
G_i and solve G_i h^{r+1} = eps for the next step. ADAPT-MESH-GEN is the
same loop for any one-step method honouring IOneStepMethod; the specialized
controller is the general one with phi* plugged in.
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np

from core.exceptions import (
    InvalidArgument,
    MaxStepsExceeded,
    NonFiniteValue,
    PicardMeshError,
    StepTooSmall,
)
from helpers.logging_helper import logger
from helpers.timing_helper import Stopwatch
from models.interfaces import IDenseApproximation, IOneStepMethod
from models.models import CoefficientPreset, SolverConfig, StepRecord, Trajectory
from models.problems import IvpProblem
from models.state import UNIT_ROUNDOFF, StateVector, as_state, norm_max
from services.interpolation_service import divided_difference, equidistant_nodes
from services.picard_service import PicardMethod


def auxiliary_point(
    x_i: float, b: float, cfg: SolverConfig, a: Optional[float] = None
) -> float:
    """
    bar_x = x_i + min(h(eps), b - x_i).

    Raises:
        StepTooSmall: if the auxiliary gap is below 10*u*(b - a)
    """
    if not x_i < b:
        raise InvalidArgument(f"auxiliary point needs x_i < b, got x_i={x_i}, b={b}")
    gap = min(cfg.aux_step_length(), b - x_i)
    span = b - (x_i if a is None else a)
    if gap < 10.0 * UNIT_ROUNDOFF * span:
        raise StepTooSmall(x_i, gap, 10.0 * UNIT_ROUNDOFF * span)
    bar_x = x_i + gap
    return b if bar_x > b else bar_x


def coefficient_from_divided_difference(
    dd_norm: float, bar_beta: float, beta: float, cfg: SolverConfig
) -> float:
    if cfg.coefficient_preset == CoefficientPreset.THEORY:
        return (4.0 / 3.0) * bar_beta * (dd_norm + beta) * (1.0 + cfg.varphi)
    bar_beta_exp = cfg.resolved_experiment_bar_beta()
    # dd_norm >= 0, so G never drops below the additive term (2/3)*bar_beta_exp
    return (4.0 / 3.0) * bar_beta_exp * dd_norm + (2.0 / 3.0) * bar_beta_exp


def local_coefficient(
    problem: IvpProblem,
    x_i: float,
    y_i: StateVector,
    bar_x: float,
    method: IOneStepMethod,
    cfg: SolverConfig,
) -> Tuple[float, float]:
    """
    Local coefficient G_i and the max norm of the divided difference.

    Spends the method's own cost on [x_i, bar_x] plus r+1 evaluations of f.

    Raises:
        DomainViolation: propagated from f
        NonFiniteValue: if the divided difference or G_i is not finite
    """
    if not x_i < bar_x <= problem.b:
        raise InvalidArgument(f"need x_i < bar_x <= b, got x_i={x_i}, bar_x={bar_x}")
    r = method.order
    auxiliary = method.step(problem, x_i, bar_x, y_i)
    nodes = equidistant_nodes(x_i, bar_x, r + 1)
    values = [problem.evaluate(t, auxiliary.evaluate(t)) for t in nodes]
    dd_norm = norm_max(divided_difference(nodes, values))

    beta = method.beta if method.beta is not None else cfg.beta
    G = coefficient_from_divided_difference(dd_norm, method.bar_beta, beta, cfg)
    if not np.isfinite(G):
        raise NonFiniteValue(f"local coefficient is not finite: {G!r}")
    return G, dd_norm


def uniform_mesh(a: float, b: float, m: int) -> List[float]:
    """x_i = a + i(b-a)/m with the last point exactly b."""
    if m < 1:
        raise InvalidArgument(f"a mesh needs at least one interval, got m={m}")
    mesh = [a + i * (b - a) / m for i in range(m + 1)]
    mesh[-1] = b
    return mesh


class AdaptiveMeshController:
    """
    Predict-then-step controller. No step is rejected or retried: each step
    looks ahead to an auxiliary point and fixes its length from G_i.
    The step is then accepted as computed.
    """

    def __init__(self, method: IOneStepMethod, problem: IvpProblem, cfg: SolverConfig):
        if method.order != cfg.order:
            raise InvalidArgument(
                f"method order {method.order} differs from configured order {cfg.order}"
            )
        self.method = method
        self.problem = problem
        self.cfg = cfg

    def _next_point(self, x: float, G: float) -> Tuple[float, float, bool]:
        """Returns (x_next, h, merged); h is the length used in G h^{r+1} = eps."""
        a, b = self.problem.a, self.problem.b
        min_step = self.cfg.resolved_min_step(a, b)
        predicted = (self.cfg.epsilon / G) ** (1.0 / (self.method.order + 1))
        remaining = b - x

        if predicted >= remaining:
            return b, remaining, False
        if predicted < min_step:
            raise StepTooSmall(x, predicted, min_step)

        x_next = x + predicted
        if b - x_next < min_step:
            logger.warning(
                f"Residue {b - x_next!r} below min_step {min_step!r} at x={x!r}; "
                "extending the step to b"
            )
            return b, remaining, True
        return x_next, predicted, False

    def run(self) -> Trajectory:
        problem, cfg, method = self.problem, self.cfg, self.method
        stopwatch = Stopwatch()
        problem.reset_counter()
        logger.info(
            f"Adaptive solve of '{problem.name}' with {method!r}: eps={cfg.epsilon:g} "
            f"preset={cfg.coefficient_preset.value} aux={cfg.aux_step_rule.value}"
        )

        x = problem.a
        y = problem.eta
        mesh = [x]
        steps: List[StepRecord] = []
        pieces: List[IDenseApproximation] = []

        try:
            while x < problem.b:
                if len(steps) >= cfg.max_steps:
                    raise MaxStepsExceeded(cfg.max_steps, x)
                problem.begin_step()
                raw_before = problem.eval_count
                distinct_before = problem.distinct_eval_count

                bar_x = auxiliary_point(x, problem.b, cfg, problem.a)
                G, dd_norm = local_coefficient(problem, x, y, bar_x, method, cfg)
                x_next, h, merged = self._next_point(x, G)
                piece = method.step(problem, x, x_next, y)
                y_next = as_state(piece.evaluate(x_next))

                record = StepRecord(
                    index=len(steps),
                    x=x,
                    x_next=x_next,
                    h=h,
                    bar_x=bar_x,
                    G=G,
                    dd_norm=dd_norm,
                    f_evals=problem.eval_count - raw_before,
                    distinct_f_evals=problem.distinct_eval_count - distinct_before,
                    y=y.tolist(),
                    y_next=y_next.tolist(),
                    local_error_bound=G * h ** (method.order + 1),
                    merged=merged,
                )
                if logger.is_debug:
                    logger.debug(
                        f"step {record.index}: x={x!r} h={h!r} G={G!r} dd={dd_norm!r} "
                        f"evals={record.f_evals}"
                    )
                steps.append(record)
                pieces.append(piece)
                mesh.append(x_next)
                x, y = x_next, y_next
        except PicardMeshError as e:
            logger.error(f"Adaptive solve of '{problem.name}' failed after {len(steps)} steps: {e}")
            raise

        trajectory = Trajectory(
            problem=problem.name,
            method=repr(method),
            order=method.order,
            adaptive=True,
            config=cfg,
            mesh=mesh,
            steps=steps,
            pieces=pieces,
            total_f_evals=problem.eval_count,
            distinct_f_evals=problem.distinct_eval_count,
        )
        logger.success(
            f"Adaptive solve of '{problem.name}' done: m*={trajectory.m_star} "
            f"f_evals={trajectory.total_f_evals} in {stopwatch.elapsed_human()}"
        )
        return trajectory


def adapt_mesh_gen_solve(
    method: IOneStepMethod, problem: IvpProblem, cfg: SolverConfig
) -> Trajectory:
    """
    ADAPT-MESH-GEN: adaptive mesh for any method with a declared bar_beta.

    Raises:
        StepTooSmall: if a predicted step is below cfg.min_step before b
        MaxStepsExceeded: if more than cfg.max_steps steps are needed
        DomainViolation: propagated from f
    """
    return AdaptiveMeshController(method, problem, cfg).run()


def adapt_mesh_solve(problem: IvpProblem, cfg: SolverConfig) -> Trajectory:
    """ADAPT-MESH: the adaptive controller driving phi* of order cfg.order."""
    return adapt_mesh_gen_solve(PicardMethod(cfg.order, bar_beta=cfg.bar_beta), problem, cfg)


def _check_mesh(problem: IvpProblem, mesh: Sequence[float]) -> List[float]:
    points = [float(x) for x in mesh]
    if len(points) < 2:
        raise InvalidArgument("a mesh needs at least two points")
    if points[0] != problem.a or points[-1] != problem.b:
        raise InvalidArgument(
            f"mesh must start at a={problem.a} and end at b={problem.b}, "
            f"got [{points[0]}, {points[-1]}]"
        )
    if not np.all(np.diff(points) > 0.0):
        raise InvalidArgument("mesh must be strictly increasing")
    return points


def fixed_mesh_solve(
    method: IOneStepMethod, problem: IvpProblem, mesh: Sequence[float]
) -> Trajectory:
    """
    Drive a method across a given mesh. No estimator calls are made, so each
    step costs exactly the method's cost_per_step.

    Raises:
        InvalidArgument: if the mesh is not a = x_0 < ... < x_m = b
        DomainViolation: propagated from f
    """
    points = _check_mesh(problem, mesh)
    stopwatch = Stopwatch()
    problem.reset_counter()

    y = problem.eta
    steps: List[StepRecord] = []
    pieces: List[IDenseApproximation] = []
    try:
        for i, (x, x_next) in enumerate(zip(points, points[1:])):
            problem.begin_step()
            raw_before = problem.eval_count
            distinct_before = problem.distinct_eval_count

            piece = method.step(problem, x, x_next, y)
            y_next = as_state(piece.evaluate(x_next))
            steps.append(
                StepRecord(
                    index=i,
                    x=x,
                    x_next=x_next,
                    h=x_next - x,
                    f_evals=problem.eval_count - raw_before,
                    distinct_f_evals=problem.distinct_eval_count - distinct_before,
                    y=y.tolist(),
                    y_next=y_next.tolist(),
                )
            )
            pieces.append(piece)
            y = y_next
    except PicardMeshError as e:
        logger.error(f"Fixed-mesh solve of '{problem.name}' failed after {len(steps)} steps: {e}")
        raise

    logger.info(
        f"Fixed-mesh solve of '{problem.name}' with {method!r}: m={len(steps)} "
        f"f_evals={problem.eval_count} in {stopwatch.elapsed_human()}"
    )
    return Trajectory(
        problem=problem.name,
        method=repr(method),
        order=method.order,
        adaptive=False,
        mesh=points,
        steps=steps,
        pieces=pieces,
        total_f_evals=problem.eval_count,
        distinct_f_evals=problem.distinct_eval_count,
    )
