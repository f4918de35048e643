"""
Domain Layer: dense local approximations.

Vector polynomials are stored as local monomial coefficient rows,
``coefficients[k]`` multiplying ``(t - origin)**k``, one column per
component of the state.
"""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from core.exceptions import InvalidArgument, NonFiniteValue, OutOfRange
from models.interfaces import IDenseApproximation
from models.state import UNIT_ROUNDOFF, StateVector


def horner(rows: np.ndarray, s: float) -> StateVector:
    """Evaluate coefficient rows at the local variable s."""
    value = rows[-1].copy()
    for k in range(rows.shape[0] - 2, -1, -1):
        value = value * s + rows[k]
    return value


class LocalPolynomial(BaseModel):
    """
    Vector polynomial in the local variable (t - origin).

    args:
        origin (float): expansion point
        coefficients (ndarray): shape (degree + 1, d)
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    origin: float = Field(..., description="Expansion point of the local variable.")
    coefficients: np.ndarray = Field(
        ..., description="Coefficient rows, row k multiplies (t - origin)**k."
    )

    @field_validator("coefficients", mode="before")
    @classmethod
    def _as_matrix(cls, value) -> np.ndarray:
        matrix = np.array(value, dtype=np.float64)
        if matrix.ndim == 1:
            matrix = matrix.reshape(-1, 1)
        if matrix.ndim != 2 or matrix.shape[0] == 0 or matrix.shape[1] == 0:
            raise InvalidArgument(f"coefficients must be a (k, d) matrix, got {matrix.shape}")
        if not np.all(np.isfinite(matrix)):
            raise NonFiniteValue("polynomial has non-finite coefficients")
        matrix.setflags(write=False)
        return matrix

    @property
    def degree(self) -> int:
        return self.coefficients.shape[0] - 1

    @property
    def dimension(self) -> int:
        return self.coefficients.shape[1]

    def __call__(self, t: float) -> StateVector:
        """Horner evaluation in the local variable t - origin."""
        return horner(self.coefficients, t - self.origin)


class PolynomialPiece(LocalPolynomial, IDenseApproximation):
    """
    Degree-<=r polynomial approximation on one subinterval [start, end],
    expanded around start. Row 0 is the step's initial value y_i.
    """

    end: float = Field(..., description="Right endpoint x_{i+1}.")

    @model_validator(mode="after")
    def _check_interval(self) -> "PolynomialPiece":
        if not self.origin < self.end:
            raise InvalidArgument(f"piece needs start < end, got [{self.origin}, {self.end}]")
        return self

    @property
    def start(self) -> float:
        return self.origin

    @property
    def initial_value(self) -> StateVector:
        return self.coefficients[0]

    def interval(self) -> tuple[float, float]:
        return self.origin, self.end

    def evaluate(self, t: float) -> StateVector:
        slack = 10.0 * UNIT_ROUNDOFF * max(self.end - self.origin, abs(self.end), abs(self.origin))
        if t < self.origin - slack or t > self.end + slack:
            raise OutOfRange(t, self.origin, self.end)
        return self(t)

    def coefficient_rows(self) -> list[list[float]]:
        return self.coefficients.tolist()
