"""
Error hierarchy shared by every layer.

Each error carries a machine-readable ``error_name`` and the process
``exit_code`` the command layer uses when it surfaces the error.
"""

from typing import Optional, Sequence


class PicardMeshError(Exception):
    """Base class for all solver, kernel and oracle errors."""

    error_name: str = "PicardMeshError"
    exit_code: int = 3

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message

    def __str__(self) -> str:
        return f"{self.error_name}: {self.message}"


class InvalidArgument(PicardMeshError, ValueError):
    error_name = "InvalidArgument"
    exit_code = 2


class InvalidNodes(PicardMeshError, ValueError):
    error_name = "InvalidNodes"


class NonFiniteValue(PicardMeshError):
    error_name = "NonFiniteValue"


class DomainViolation(PicardMeshError):
    """
    Raised when the right-hand side is evaluated outside its domain or
    returns a non-finite value.

    Args:
        t: time argument of the offending call
        y: state argument of the offending call
    """

    error_name = "DomainViolation"

    def __init__(self, message: str, t: float, y: Optional[Sequence[float]] = None):
        self.t = float(t)
        self.y = None if y is None else [float(v) for v in y]
        super().__init__(f"{message} (t={self.t!r}, y={self.y!r})")


class OutOfRange(PicardMeshError):
    error_name = "OutOfRange"

    def __init__(self, t: float, start: float, end: float):
        super().__init__(f"t={t!r} outside [{start!r}, {end!r}]")
        self.t = t
        self.start = start
        self.end = end


class StepTooSmall(PicardMeshError):
    error_name = "StepTooSmall"

    def __init__(self, x: float, step: float, min_step: float):
        super().__init__(f"step {step!r} at x={x!r} below minimum {min_step!r}")
        self.x = x
        self.step = step
        self.min_step = min_step


class MaxStepsExceeded(PicardMeshError):
    error_name = "MaxStepsExceeded"

    def __init__(self, max_steps: int, x: float):
        super().__init__(f"more than {max_steps} steps needed (stopped at x={x!r})")
        self.max_steps = max_steps
        self.x = x


class OracleFailure(PicardMeshError):
    error_name = "OracleFailure"
    exit_code = 4
