from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from models.models import Trajectory
from models.polynomials import PolynomialPiece


class StepDocument(BaseModel):
    """
    One step of a serialized trajectory.
    args:
        i (int): step index
        x (float): x_i
        x_next (float): x_{i+1}
        h (float): step length of the step equation
        bar_x (float): auxiliary point, null on fixed meshes
        G (float): local coefficient, null on fixed meshes
        dd_norm (float): divided-difference norm, null on fixed meshes
        f_evals (int): raw rhs evaluations of the step
        y (list): y_i
        y_next (list): y_{i+1}
    """

    i: int
    x: float
    x_next: float
    h: float
    bar_x: Optional[float] = None
    G: Optional[float] = None
    dd_norm: Optional[float] = None
    f_evals: int
    y: List[float]
    y_next: List[float]


class TrajectoryDocument(BaseModel):
    """Everything needed to replay any step of a solve from the file alone."""

    problem: str = Field(..., description="Problem label.")
    order: int = Field(..., description="Method order r.")
    method: str = Field(..., description="One-step method.")
    config: Optional[Dict[str, Any]] = Field(default=None, description="Solver configuration.")
    mesh: List[float]
    steps: List[StepDocument]
    pieces: List[List[List[float]]] = Field(
        default_factory=list, description="Coefficient rows per piece, row k multiplies (t - x_i)**k."
    )
    total_f_evals: int
    distinct_f_evals: int

    @classmethod
    def from_trajectory(cls, trajectory: Trajectory) -> "TrajectoryDocument":
        return cls(
            problem=trajectory.problem,
            order=trajectory.order,
            method=trajectory.method,
            config=trajectory.config.model_dump(mode="json") if trajectory.config else None,
            mesh=trajectory.mesh,
            steps=[
                StepDocument(
                    i=record.index,
                    x=record.x,
                    x_next=record.x_next,
                    h=record.h,
                    bar_x=record.bar_x,
                    G=record.G,
                    dd_norm=record.dd_norm,
                    f_evals=record.f_evals,
                    y=record.y,
                    y_next=record.y_next,
                )
                for record in trajectory.steps
            ],
            pieces=[
                piece.coefficient_rows()
                for piece in trajectory.pieces
                if isinstance(piece, PolynomialPiece)
            ],
            total_f_evals=trajectory.total_f_evals,
            distinct_f_evals=trajectory.distinct_f_evals,
        )
