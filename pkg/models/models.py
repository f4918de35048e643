import bisect
import enum
import math
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from models.interfaces import IDenseApproximation
from models.state import UNIT_ROUNDOFF


class AuxStepRule(str, enum.Enum):
    """How the auxiliary step length h(eps) is chosen."""

    EPS_POWER = "eps_power"
    ROUNDOFF_POWER = "roundoff_power"
    FIXED = "fixed"


class CoefficientPreset(str, enum.Enum):
    THEORY = "theory"
    EXPERIMENT = "experiment"


class SolverConfig(BaseModel):
    """
    Parameters of the adaptive mesh selection.
    args:
        epsilon (float): prescribed local error level, in (0, 1)
        beta (float): additive safety term of the local coefficient
        varphi (float): relative slack of the coefficient estimate, in (0, 1)
        order (int): method order r
        aux_step_rule (AuxStepRule): rule for the auxiliary step length h(eps)
        aux_step_value (float): auxiliary step length for the fixed rule
        unit_roundoff (float): machine precision assumed by roundoff_power
        coefficient_preset (CoefficientPreset): theory or experiment formula for G_i
        experiment_bar_beta (float): override of the experiment preset's bar_beta
        min_step (float): smallest accepted step; None means 100*u*(b-a)
        max_steps (int): abort after this many steps
        bar_beta (float): bar_beta of the basic Picard method
    """

    model_config = ConfigDict(frozen=True)

    epsilon: float = Field(..., gt=0.0, lt=1.0, description="Local error level.")
    beta: float = Field(default=1.0, gt=0.0)
    varphi: float = Field(default=0.5, gt=0.0, lt=1.0)
    order: int = Field(default=1, ge=1, le=10)
    aux_step_rule: AuxStepRule = Field(default=AuxStepRule.ROUNDOFF_POWER)
    aux_step_value: Optional[float] = Field(default=None, gt=0.0)
    unit_roundoff: float = Field(default=1e-15, gt=0.0, lt=1.0)
    coefficient_preset: CoefficientPreset = Field(default=CoefficientPreset.EXPERIMENT)
    experiment_bar_beta: Optional[float] = Field(default=None, gt=0.0)
    min_step: Optional[float] = Field(default=None, gt=0.0)
    max_steps: int = Field(default=100_000_000, ge=1)
    bar_beta: float = Field(default=2.0, gt=0.0)

    @model_validator(mode="after")
    def _check_fixed_rule(self) -> "SolverConfig":
        if self.aux_step_rule == AuxStepRule.FIXED and self.aux_step_value is None:
            raise ValueError("aux_step_value is required for the fixed auxiliary rule")
        return self

    def aux_step_length(self) -> float:
        """h(eps) before clamping to the interval."""
        exponent = 1.0 / (self.order + 1)
        if self.aux_step_rule == AuxStepRule.EPS_POWER:
            return self.epsilon**exponent
        if self.aux_step_rule == AuxStepRule.ROUNDOFF_POWER:
            return self.unit_roundoff**exponent
        return float(self.aux_step_value)

    def resolved_min_step(self, a: float, b: float) -> float:
        if self.min_step is not None:
            return self.min_step
        return 100.0 * UNIT_ROUNDOFF * (b - a)

    def resolved_experiment_bar_beta(self) -> float:
        # 2|dd|+1 at r=1 and 4|dd|+2 at r=2
        if self.experiment_bar_beta is not None:
            return self.experiment_bar_beta
        return 0.75 * 2.0**self.order


class StepRecord(BaseModel):
    """
    One accepted step of a solve.
    args:
        index (int): step number i
        x (float): x_i
        x_next (float): x_{i+1}
        h (float): step length used in the step equation G_i h^{r+1} = eps
        bar_x (float): auxiliary point (adaptive solves only)
        G (float): local coefficient (adaptive solves only)
        dd_norm (float): max norm of the divided difference (adaptive solves only)
        f_evals (int): raw rhs evaluations spent on the step
        distinct_f_evals (int): evaluations with distinct arguments
        y (list): y_i
        y_next (list): y_{i+1}
        local_error_bound (float): G_i * h_i^{r+1}
        merged (bool): step was stretched to b to absorb a residue below min_step
    """

    model_config = ConfigDict(frozen=True)

    index: int = Field(..., ge=0)
    x: float
    x_next: float
    h: float = Field(..., gt=0.0)
    bar_x: Optional[float] = None
    G: Optional[float] = Field(default=None, gt=0.0)
    dd_norm: Optional[float] = Field(default=None, ge=0.0)
    f_evals: int = Field(..., ge=0)
    distinct_f_evals: int = Field(default=0, ge=0)
    y: List[float]
    y_next: List[float]
    local_error_bound: Optional[float] = Field(default=None, ge=0.0)
    merged: bool = False


class Trajectory(BaseModel):
    """
    Global dense approximation: mesh a = x_0 < ... < x_m = b, one record and
    one piece per subinterval.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    problem: str = Field(..., description="Problem label.")
    method: str = Field(..., description="One-step method used.")
    order: int = Field(..., ge=1)
    adaptive: bool = Field(..., description="Mesh chosen by the controller.")
    config: Optional[SolverConfig] = None
    mesh: List[float]
    steps: List[StepRecord]
    pieces: List[IDenseApproximation]
    total_f_evals: int = Field(..., ge=0)
    distinct_f_evals: int = Field(default=0, ge=0)

    @property
    def m_star(self) -> int:
        return len(self.steps)

    def evaluate(self, t: float):
        """Dense output l(t) of the whole trajectory."""
        k = bisect.bisect_right(self.mesh, t) - 1
        k = min(max(k, 0), len(self.pieces) - 1)
        return self.pieces[k].evaluate(t)

    def invariant_violations(self, rel_tol: float = 1e-12) -> List[str]:
        """
        Check the structural invariants; returns a list of violations
        (empty when the trajectory is consistent).
        """
        problems: List[str] = []
        if len(self.mesh) != len(self.steps) + 1 or len(self.pieces) != len(self.steps):
            return [f"sizes differ: mesh={len(self.mesh)} steps={len(self.steps)} pieces={len(self.pieces)}"]
        if any(b <= a for a, b in zip(self.mesh, self.mesh[1:])):
            problems.append("mesh is not strictly increasing")

        for k, (record, piece) in enumerate(zip(self.steps, self.pieces)):
            start, end = piece.interval()
            if start != self.mesh[k] or end != self.mesh[k + 1]:
                problems.append(f"piece {k} spans [{start}, {end}], mesh says [{self.mesh[k]}, {self.mesh[k + 1]}]")
            if record.x != self.mesh[k] or record.x_next != self.mesh[k + 1]:
                problems.append(f"record {k} endpoints disagree with the mesh")
            if piece.evaluate(start).tolist() != record.y:
                problems.append(f"piece {k} does not start at y_{k}")
            if piece.evaluate(end).tolist() != record.y_next:
                problems.append(f"record {k} y_next is not the piece value at x_{k + 1}")
            if k > 0 and self.steps[k - 1].y_next != record.y:
                problems.append(f"handoff broken between steps {k - 1} and {k}")
            if abs(record.x + record.h - record.x_next) > 4.0 * UNIT_ROUNDOFF * max(1.0, abs(record.x_next)):
                problems.append(f"record {k} h disagrees with x_next - x")

        if self.adaptive and self.config is not None:
            eps = self.config.epsilon
            power = self.order + 1
            for k, record in enumerate(self.steps):
                if record.G is None or record.bar_x is None:
                    problems.append(f"adaptive record {k} lacks G or bar_x")
                    continue
                if not record.x < record.bar_x:
                    problems.append(f"record {k} has bar_x <= x")
                product = record.G * record.h**power
                last = k == len(self.steps) - 1
                if not last and not math.isclose(product, eps, rel_tol=rel_tol):
                    problems.append(f"step {k}: G h^(r+1) = {product!r} != eps")
                if last and not record.merged and product > eps * (1.0 + rel_tol):
                    problems.append(f"last step: G h^(r+1) = {product!r} > eps")
        return problems


class TableRow(BaseModel):
    """
    One (delta, eps, r) cell of the cost/error table.
    args:
        delta (float): test problem parameter
        eps (float): local error level
        r (int): order
        m_star (int): intervals chosen by the adaptive controller (0 on failure)
        maxerr_over_eps (float): adaptive MAXERR / eps
        equidist_over_eps (float): uniform-mesh local error / eps with m_star intervals
        f_evals_adaptive (int): raw rhs evaluations, adaptive run
        f_evals_uniform (int): raw rhs evaluations, uniform run
        wall_time_ms (float): wall time of the cell
        equidist_equal_cost_over_eps (float): uniform run with the same raw evaluation budget
        error (str): error name when the cell failed
    """

    delta: float
    eps: float
    r: int = Field(..., ge=1)
    m_star: int = Field(..., ge=0)
    maxerr_over_eps: float
    equidist_over_eps: float
    f_evals_adaptive: int = Field(..., ge=0)
    f_evals_uniform: int = Field(..., ge=0)
    wall_time_ms: float = Field(..., ge=0.0)
    equidist_equal_cost_over_eps: float = float("nan")
    error: str = ""

    @property
    def succeeded(self) -> bool:
        return not self.error


TABLE_COLUMNS = [
    "delta",
    "eps",
    "r",
    "m_star",
    "maxerr_over_eps",
    "equidist_over_eps",
    "f_evals_adaptive",
    "f_evals_uniform",
    "wall_time_ms",
]


class OrderFit(BaseModel):
    """Fitted log-log slope for one order in an order check."""

    order: int = Field(..., ge=1)
    mode: str
    slope: float
    expected: float
    n_points: int = Field(..., ge=0)


class OrderCheckMode(str, enum.Enum):
    LOCAL = "local"
    GLOBAL = "global"
    MESH_SCALING = "mesh-scaling"


class TableCellRequest(BaseModel):
    """
    Inputs of one table cell; picklable so cells can run in worker processes.
    args:
        delta (float): test problem parameter (ignored by problems without one)
        eps (float): local error level
        r (int): order
        problem (str): registry identifier
        coefficient_preset (CoefficientPreset): G_i formula
        aux_step_rule (AuxStepRule): auxiliary step length rule
        aux_step_value (float): auxiliary step length for the fixed rule
        max_steps (int): step cap of the adaptive run
        sample_interior (bool): measure local errors at interior points too
        equal_cost (bool): also run phi* uniformly with the adaptive evaluation budget
    """

    model_config = ConfigDict(frozen=True)

    delta: float
    eps: float
    r: int = Field(..., ge=1)
    problem: str = "test"
    coefficient_preset: CoefficientPreset = CoefficientPreset.EXPERIMENT
    aux_step_rule: AuxStepRule = AuxStepRule.ROUNDOFF_POWER
    aux_step_value: Optional[float] = None
    max_steps: int = Field(default=1_000_000, ge=1)
    sample_interior: bool = False
    equal_cost: bool = False


class SolveSummary(BaseModel):
    """What a single adaptive solve reports on stdout."""

    problem: str
    order: int
    epsilon: float
    m_star: int
    maxerr: float
    maxerr_over_eps: float
    total_f_evals: int
    distinct_f_evals: int
    oracle: str
    wall_time_ms: float
