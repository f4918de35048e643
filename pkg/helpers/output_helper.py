"""
Writers for command data. Tables go through pandas with 17 significant
digits so a parsed CSV reproduces the in-memory floats exactly.
"""

import io
import sys
from pathlib import Path
from typing import List, NoReturn, Optional, Sequence

import numpy as np
import pandas as pd
import typer
from pydantic import TypeAdapter

from core.exceptions import InvalidArgument, PicardMeshError
from helpers.logging_helper import logger
from models.models import TABLE_COLUMNS, OrderFit, SolveSummary, TableRow, Trajectory

FLOAT_FORMAT = "%.17g"

_table_rows = TypeAdapter(List[TableRow])
_order_fits = TypeAdapter(List[OrderFit])


def table_frame(rows: Sequence[TableRow]) -> pd.DataFrame:
    frame = pd.DataFrame([row.model_dump() for row in rows], columns=list(TableRow.model_fields))
    return frame[TABLE_COLUMNS]


def table_to_csv(rows: Sequence[TableRow]) -> str:
    """CSV with the fixed nine-column header; failed cells leave the ratios empty."""
    return table_frame(rows).to_csv(index=False, float_format=FLOAT_FORMAT)


def _python_scalar(value):
    return value.item() if isinstance(value, np.generic) else value


def table_from_csv(text: str) -> List[TableRow]:
    frame = pd.read_csv(io.StringIO(text), float_precision="round_trip")
    missing = [column for column in TABLE_COLUMNS if column not in frame.columns]
    if missing:
        raise InvalidArgument(f"table CSV lacks columns {missing}")
    records = frame[TABLE_COLUMNS].to_dict(orient="records")
    return [TableRow(**{k: _python_scalar(v) for k, v in record.items()}) for record in records]


def table_to_json(rows: Sequence[TableRow]) -> str:
    return _table_rows.dump_json(list(rows), indent=2).decode()


def order_fits_to_csv(fits: Sequence[OrderFit]) -> str:
    frame = pd.DataFrame([fit.model_dump() for fit in fits], columns=list(OrderFit.model_fields))
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT)


def order_fits_to_json(fits: Sequence[OrderFit]) -> str:
    return _order_fits.dump_json(list(fits), indent=2).decode()


def trajectory_to_csv(trajectory: Trajectory) -> str:
    """Mesh points and values: x, y0, ..., y{d-1}; row 0 is (a, eta)."""
    values = [trajectory.steps[0].y] + [record.y_next for record in trajectory.steps]
    frame = pd.DataFrame(values, columns=[f"y{k}" for k in range(len(values[0]))])
    frame.insert(0, "x", trajectory.mesh)
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT)


def format_summary(summary: SolveSummary) -> str:
    return (
        f"m*={summary.m_star} maxerr_over_eps={summary.maxerr_over_eps:.4g} "
        f"maxerr={summary.maxerr:.6g} f_evals={summary.total_f_evals} "
        f"distinct_f_evals={summary.distinct_f_evals} oracle={summary.oracle} "
        f"wall_time_ms={summary.wall_time_ms:.1f}"
    )


def emit(text: str, output: Optional[Path] = None) -> None:
    """Write command data to a file, or to stdout when no path is given."""
    if output is None:
        typer.echo(text.rstrip("\n"))
        return
    output.parent.mkdir(parents=True, exist_ok=True)
    output.write_text(text)
    logger.info(f"Wrote {output}")


def exit_with_error(error: PicardMeshError) -> NoReturn:
    """Report a solver error in machine-readable form and exit with its code."""
    print(f"error={error.error_name} message={error.message}", file=sys.stderr)
    raise typer.Exit(code=error.exit_code)
