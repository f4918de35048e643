"""
Application Layer: Experiment Service

Orchestrates solves, table cells and order checks on top of the problem
registry. Table cells are independent; with jobs > 1 they run in a process
pool, each worker building its own problem instances.
"""

from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import ValidationError

from core.context import global_context
from core.exceptions import InvalidArgument, PicardMeshError
from helpers.logging_helper import logger
from helpers.timing_helper import Stopwatch
from models.interfaces import IProblemRepository
from models.models import (
    OrderCheckMode,
    OrderFit,
    SolverConfig,
    SolveSummary,
    TableCellRequest,
    TableRow,
    Trajectory,
)
from models.problems import RegistryProblem
from models.state import norm_max
from services.error_measurement_service import (
    empirical_order,
    global_endpoint_error,
    max_local_error,
)
from services.mesh_control_service import adapt_mesh_solve, fixed_mesh_solve, uniform_mesh
from services.picard_service import PicardMethod, observed_order, picard_local_step

NAN = float("nan")


def build_config(**fields) -> SolverConfig:
    """
    SolverConfig from keyword fields; None values fall back to defaults.

    Raises:
        InvalidArgument: if validation fails
    """
    try:
        return SolverConfig(**{k: v for k, v in fields.items() if v is not None})
    except ValidationError as e:
        messages = "; ".join(
            f"{'.'.join(map(str, err['loc'])) or 'config'}: {err['msg']}" for err in e.errors()
        )
        raise InvalidArgument(f"invalid solver configuration: {messages}") from e


def adaptive_cost_per_step(r: int) -> int:
    """Raw rhs evaluations of one ADAPT-MESH step: 2r^2 + 3r + 1."""
    return 2 * r * r + 3 * r + 1


def equal_cost_intervals(m_star: int, r: int) -> int:
    """Uniform interval count spending the adaptive run's raw evaluation budget."""
    return max(1, round(m_star * adaptive_cost_per_step(r) / (r * (r + 1))))


def _run_cell(repository: IProblemRepository, request: TableCellRequest, run_id: str) -> TableRow:
    global_context.set("run_id", run_id)
    return ExperimentService(repository).table_cell(request)


class ExperimentService:
    """
    Runs the experiment harness against a problem repository.

    Args:
        problem_repository: source of problems and their oracles
    """

    def __init__(self, problem_repository: IProblemRepository):
        self.repository = problem_repository

    def _entry(self, problem_id: str, params: Optional[Dict[str, float]] = None) -> RegistryProblem:
        return self.repository.get(problem_id, **(params or {}))

    def solve(
        self,
        problem_id: str,
        params: Dict[str, float],
        cfg: SolverConfig,
        sample_interior: bool = False,
    ) -> Tuple[Trajectory, SolveSummary]:
        """
        Adaptive solve of a registry problem plus its oracle-measured MAXERR.

        Raises:
            PicardMeshError: any solver or oracle error, after logging it
        """
        stopwatch = Stopwatch()
        entry = self._entry(problem_id, params)
        try:
            trajectory = adapt_mesh_solve(entry.problem, cfg)
            maxerr = max_local_error(trajectory, entry.oracle, sample_interior)
        except PicardMeshError as e:
            logger.error(f"Solve of '{entry.label}' failed: {e.error_name}")
            raise

        summary = SolveSummary(
            problem=entry.label,
            order=cfg.order,
            epsilon=cfg.epsilon,
            m_star=trajectory.m_star,
            maxerr=maxerr,
            maxerr_over_eps=maxerr / cfg.epsilon,
            total_f_evals=trajectory.total_f_evals,
            distinct_f_evals=trajectory.distinct_f_evals,
            oracle=entry.oracle.provenance,
            wall_time_ms=stopwatch.elapsed_ms(),
        )
        return trajectory, summary

    def table_cell(self, request: TableCellRequest) -> TableRow:
        """
        One (delta, eps, r) cell: adaptive run and uniform run with m* intervals.
        With request.equal_cost, also a uniform run spending the adaptive
        run's evaluation budget.

        Failures are recorded in the row (m_star = 0, NaN ratios, error name).
        """
        stopwatch = Stopwatch()
        r, eps = request.r, request.eps
        try:
            cfg = build_config(
                epsilon=eps,
                order=r,
                coefficient_preset=request.coefficient_preset,
                aux_step_rule=request.aux_step_rule,
                aux_step_value=request.aux_step_value,
                max_steps=request.max_steps,
            )
            params = {"delta": request.delta} if request.problem == "test" else {}
            entry = self._entry(request.problem, params)
            problem, oracle = entry.problem, entry.oracle

            adaptive = adapt_mesh_solve(problem, cfg)
            maxerr = max_local_error(adaptive, oracle, request.sample_interior)
            m_star = adaptive.m_star

            method = PicardMethod(r)
            uniform = fixed_mesh_solve(method, problem, uniform_mesh(problem.a, problem.b, m_star))
            equidist = max_local_error(uniform, oracle, request.sample_interior)

            equidist_equal_cost = NAN
            if request.equal_cost:
                m_equal = equal_cost_intervals(m_star, r)
                equal_cost = fixed_mesh_solve(method, problem, uniform_mesh(problem.a, problem.b, m_equal))
                equidist_equal_cost = max_local_error(equal_cost, oracle, request.sample_interior)
        except PicardMeshError as e:
            logger.error(f"Table cell delta={request.delta:g} eps={eps:g} r={r} failed: {e}")
            return TableRow(
                delta=request.delta,
                eps=eps,
                r=r,
                m_star=0,
                maxerr_over_eps=NAN,
                equidist_over_eps=NAN,
                f_evals_adaptive=0,
                f_evals_uniform=0,
                wall_time_ms=stopwatch.elapsed_ms(),
                error=e.error_name,
            )

        row = TableRow(
            delta=request.delta,
            eps=eps,
            r=r,
            m_star=m_star,
            maxerr_over_eps=maxerr / eps,
            equidist_over_eps=equidist / eps,
            f_evals_adaptive=adaptive.total_f_evals,
            f_evals_uniform=uniform.total_f_evals,
            wall_time_ms=stopwatch.elapsed_ms(),
            equidist_equal_cost_over_eps=equidist_equal_cost / eps,
        )
        logger.info(
            f"Cell delta={request.delta:g} eps={eps:g} r={r}: m*={m_star} "
            f"maxerr/eps={row.maxerr_over_eps:.4g} equidist/eps={row.equidist_over_eps:.4g}"
        )
        return row

    def table(self, requests: Sequence[TableCellRequest], jobs: int = 1) -> List[TableRow]:
        """Every cell of the grid, sorted by (delta, eps, r)."""
        if jobs < 1:
            raise InvalidArgument(f"jobs must be >= 1, got {jobs}")
        if jobs == 1 or len(requests) <= 1:
            rows = [self.table_cell(request) for request in requests]
        else:
            run_id = global_context.get("run_id", "")
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                futures = [pool.submit(_run_cell, self.repository, request, run_id) for request in requests]
                rows = [future.result() for future in futures]
        return sorted(rows, key=lambda row: (row.delta, row.eps, row.r))

    def order_check(
        self,
        problem_id: str,
        params: Dict[str, float],
        orders: Sequence[int],
        mode: OrderCheckMode,
        m_list: Sequence[int] = (),
        eps_list: Sequence[float] = (),
        **config_fields,
    ) -> List[OrderFit]:
        """
        Fitted log-log slope per order.

        local: endpoint defect of one step of length (b-a)/m against h
        global: endpoint global error on uniform meshes against max h
        Both expect observed_order(r), one higher for local defects.
        mesh-scaling: m* of adaptive runs against 1/eps

        Raises:
            InvalidArgument: with fewer than 3 scales
        """
        scales = eps_list if mode == OrderCheckMode.MESH_SCALING else m_list
        if len(scales) < 3:
            raise InvalidArgument(f"{mode.value} order check needs at least 3 scales, got {len(scales)}")

        fits: List[OrderFit] = []
        for r in orders:
            if mode == OrderCheckMode.LOCAL:
                samples = self._local_samples(problem_id, params, r, m_list)
                expected = observed_order(r) + 1.0
            elif mode == OrderCheckMode.GLOBAL:
                samples = self._global_samples(problem_id, params, r, m_list)
                expected = float(observed_order(r))
            else:
                samples = self._scaling_samples(problem_id, params, r, eps_list, config_fields)
                expected = 1.0 / (r + 1)
            slope = empirical_order(samples)
            logger.info(f"Order check {mode.value} r={r}: slope={slope:.4f} expected={expected:.4f}")
            fits.append(
                OrderFit(order=r, mode=mode.value, slope=slope, expected=expected, n_points=len(samples))
            )
        return fits

    def _local_samples(self, problem_id, params, r: int, m_list: Sequence[int]) -> List[Tuple[float, float]]:
        samples = []
        for m in m_list:
            if m < 1:
                raise InvalidArgument(f"interval counts must be >= 1, got {m}")
            entry = self._entry(problem_id, params)
            problem = entry.problem
            h = (problem.b - problem.a) / m
            piece = picard_local_step(problem, problem.a, problem.eta, h, r)
            _, end = piece.interval()
            exact = entry.oracle.solve(problem.a, problem.eta, end)
            samples.append((h, norm_max(exact - piece.evaluate(end))))
        return samples

    def _global_samples(self, problem_id, params, r: int, m_list: Sequence[int]) -> List[Tuple[float, float]]:
        samples = []
        for m in m_list:
            entry = self._entry(problem_id, params)
            mesh = uniform_mesh(entry.problem.a, entry.problem.b, m)
            trajectory = fixed_mesh_solve(PicardMethod(r), entry.problem, mesh)
            max_h = max(record.h for record in trajectory.steps)
            samples.append((max_h, global_endpoint_error(trajectory, entry.oracle)))
        return samples

    def _scaling_samples(
        self, problem_id, params, r: int, eps_list: Sequence[float], config_fields
    ) -> List[Tuple[float, float]]:
        samples = []
        for eps in eps_list:
            entry = self._entry(problem_id, params)
            cfg = build_config(epsilon=eps, order=r, **config_fields)
            trajectory = adapt_mesh_solve(entry.problem, cfg)
            samples.append((1.0 / eps, float(trajectory.m_star)))
        return samples
