"""
Presentation Layer: order-check

Fits log-log slopes per order: local defect against h, global error
against max h, or m* against 1/eps.
"""

import enum
from pathlib import Path
from typing import Optional

import typer

from core.context import global_context
from core.dependencies import get_experiment_service
from core.exceptions import PicardMeshError
from helpers.cli_helper import parse_float_list, parse_int_list, resolve_max_steps
from helpers.output_helper import emit, exit_with_error, order_fits_to_csv, order_fits_to_json
from models.models import AuxStepRule, CoefficientPreset, OrderCheckMode


class FitFormat(str, enum.Enum):
    CSV = "csv"
    JSON = "json"


def order_check(
    problem: str = typer.Option("exp", "--problem", help="Registry problem id."),
    delta: Optional[float] = typer.Option(None, "--delta"),
    lam: Optional[float] = typer.Option(None, "--lam"),
    orders: str = typer.Option("1,2,3", "--orders"),
    mode: OrderCheckMode = typer.Option(OrderCheckMode.GLOBAL, "--mode"),
    m_list: str = typer.Option("16,32,64,128,256", "--m-list", help="Interval counts (local, global)."),
    eps_list: str = typer.Option("1e-2,1e-4,1e-6,1e-8", "--eps-list", help="Local error levels (mesh-scaling)."),
    preset: CoefficientPreset = typer.Option(CoefficientPreset.EXPERIMENT, "--preset"),
    aux_rule: AuxStepRule = typer.Option(AuxStepRule.ROUNDOFF_POWER, "--aux-rule"),
    max_steps: Optional[int] = typer.Option(None, "--max-steps"),
    allow_huge: bool = typer.Option(False, "--allow-huge"),
    output_format: FitFormat = typer.Option(FitFormat.CSV, "--format"),
    output: Optional[Path] = typer.Option(None, "--output"),
):
    """
    Emit one fitted slope per order with the slope the theory predicts.
    """
    global_context.new_run("order-check")
    try:
        scaling = mode == OrderCheckMode.MESH_SCALING
        fits = get_experiment_service().order_check(
            problem,
            {"delta": delta, "lam": lam},
            parse_int_list(orders, "orders"),
            mode,
            m_list=[] if scaling else parse_int_list(m_list, "m-list"),
            eps_list=parse_float_list(eps_list, "eps-list") if scaling else [],
            coefficient_preset=preset,
            aux_step_rule=aux_rule,
            max_steps=resolve_max_steps(max_steps, allow_huge),
        )
    except PicardMeshError as e:
        exit_with_error(e)

    emit(order_fits_to_csv(fits) if output_format == FitFormat.CSV else order_fits_to_json(fits), output)
