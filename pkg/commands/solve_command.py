"""
Presentation Layer: solve

Single adaptive solve of a registry problem. The summary goes to stdout;
the trajectory is written to --output when given.
"""

import enum
from pathlib import Path
from typing import Optional

import typer

from commands.schemas import TrajectoryDocument
from core.context import global_context
from core.dependencies import get_experiment_service
from core.exceptions import PicardMeshError
from helpers.cli_helper import resolve_max_steps
from helpers.output_helper import emit, exit_with_error, format_summary, trajectory_to_csv
from models.models import AuxStepRule, CoefficientPreset
from services.experiment_service import build_config


class TrajectoryFormat(str, enum.Enum):
    JSON = "json"
    CSV = "csv"


def solve(
    problem: str = typer.Option("test", "--problem", help="Registry problem id."),
    delta: Optional[float] = typer.Option(None, "--delta", help="Test problem parameter (eta = 1 + delta)."),
    lam: Optional[float] = typer.Option(None, "--lam", help="Rate of the exp problem."),
    eps: float = typer.Option(..., "--eps", help="Local error level in (0, 1)."),
    order: int = typer.Option(1, "--order", help="Method order r."),
    preset: CoefficientPreset = typer.Option(CoefficientPreset.EXPERIMENT, "--preset"),
    aux_rule: AuxStepRule = typer.Option(AuxStepRule.ROUNDOFF_POWER, "--aux-rule"),
    aux_value: Optional[float] = typer.Option(None, "--aux-value", help="Auxiliary step length for --aux-rule fixed."),
    beta: float = typer.Option(1.0, "--beta"),
    varphi: float = typer.Option(0.5, "--varphi"),
    unit_roundoff: float = typer.Option(1e-15, "--unit-roundoff", help="u of the roundoff_power rule."),
    max_steps: Optional[int] = typer.Option(None, "--max-steps"),
    allow_huge: bool = typer.Option(False, "--allow-huge", help="Raise the step cap to the huge limit."),
    interior_samples: bool = typer.Option(False, "--interior-samples", help="Also measure 8 interior points per step."),
    output: Optional[Path] = typer.Option(None, "--output", help="Trajectory file."),
    output_format: TrajectoryFormat = typer.Option(TrajectoryFormat.JSON, "--format"),
):
    """
    Run ADAPT-MESH on one problem and print m*, MAXERR/eps and evaluation counts.
    """
    global_context.new_run("solve")
    try:
        cfg = build_config(
            epsilon=eps,
            order=order,
            coefficient_preset=preset,
            aux_step_rule=aux_rule,
            aux_step_value=aux_value,
            beta=beta,
            varphi=varphi,
            unit_roundoff=unit_roundoff,
            max_steps=resolve_max_steps(max_steps, allow_huge),
        )
        service = get_experiment_service()
        trajectory, summary = service.solve(
            problem, {"delta": delta, "lam": lam}, cfg, sample_interior=interior_samples
        )
    except PicardMeshError as e:
        exit_with_error(e)

    if output is not None:
        if output_format == TrajectoryFormat.JSON:
            emit(TrajectoryDocument.from_trajectory(trajectory).model_dump_json(indent=2), output)
        else:
            emit(trajectory_to_csv(trajectory), output)
    emit(format_summary(summary))
