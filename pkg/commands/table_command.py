"""
Presentation Layer: table

Cost/error table over a (delta, eps, r) grid: m*, MAXERR/eps of the
adaptive run and EQUIDIST/eps of phi* on the uniform mesh with m* intervals.
"""

import enum
import itertools
from pathlib import Path
from typing import Optional

import typer
from pydantic import ValidationError

from core.context import global_context
from core.dependencies import get_experiment_service
from core.exceptions import InvalidArgument, PicardMeshError
from helpers.cli_helper import parse_float_list, parse_int_list, resolve_max_steps
from helpers.logging_helper import logger
from helpers.output_helper import emit, exit_with_error, table_to_csv, table_to_json
from helpers.timing_helper import Stopwatch
from models.models import AuxStepRule, CoefficientPreset, TableCellRequest


class TableFormat(str, enum.Enum):
    CSV = "csv"
    JSON = "json"


def table(
    deltas: str = typer.Option("0.1,0.01", "--deltas", help="Comma-separated delta values."),
    epsilons: str = typer.Option("1e-2,1e-4,1e-8", "--epsilons", help="Comma-separated eps values."),
    orders: str = typer.Option("1,2", "--orders", help="Comma-separated orders."),
    problem: str = typer.Option("test", "--problem", help="Registry problem id; delta only applies to test."),
    preset: CoefficientPreset = typer.Option(CoefficientPreset.EXPERIMENT, "--preset"),
    aux_rule: AuxStepRule = typer.Option(AuxStepRule.ROUNDOFF_POWER, "--aux-rule"),
    aux_value: Optional[float] = typer.Option(None, "--aux-value"),
    max_steps: Optional[int] = typer.Option(None, "--max-steps"),
    allow_huge: bool = typer.Option(False, "--allow-huge", help="Allow the eps=1e-14 sized runs."),
    interior_samples: bool = typer.Option(False, "--interior-samples"),
    equal_cost: bool = typer.Option(
        False, "--equal-cost", help="Also report the uniform run with the adaptive evaluation budget (JSON only)."
    ),
    output_format: TableFormat = typer.Option(TableFormat.CSV, "--format"),
    jobs: int = typer.Option(1, "--jobs", help="Worker processes for independent cells."),
    output: Optional[Path] = typer.Option(None, "--output"),
):
    """
    Reproduce the adaptive-vs-uniform table. Failed cells stay in the output
    with m_star=0; the command fails only when every cell failed.
    """
    global_context.new_run("table")
    stopwatch = Stopwatch()
    try:
        cap = resolve_max_steps(max_steps, allow_huge)
        requests = [
            TableCellRequest(
                delta=delta,
                eps=eps,
                r=r,
                problem=problem,
                coefficient_preset=preset,
                aux_step_rule=aux_rule,
                aux_step_value=aux_value,
                max_steps=cap,
                sample_interior=interior_samples,
                equal_cost=equal_cost,
            )
            for delta, eps, r in itertools.product(
                parse_float_list(deltas, "deltas"),
                parse_float_list(epsilons, "epsilons"),
                parse_int_list(orders, "orders"),
            )
        ]
        rows = get_experiment_service().table(requests, jobs=jobs)
    except ValidationError as e:
        exit_with_error(InvalidArgument(f"invalid table cell: {e.errors()[0]['msg']}"))
    except PicardMeshError as e:
        exit_with_error(e)

    text = table_to_csv(rows) if output_format == TableFormat.CSV else table_to_json(rows)
    emit(text, output)

    succeeded = sum(row.succeeded for row in rows)
    logger.info(f"Table: {succeeded}/{len(rows)} cells succeeded in {stopwatch.elapsed_human()}")
    if succeeded == 0:
        raise typer.Exit(code=3)
