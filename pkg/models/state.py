"""
Domain Layer: state vectors in R^d under the maximum norm.

A StateVector is a 1-D float64 numpy array of fixed length d >= 1.
"""

from typing import Iterable, Union

import numpy as np
import numpy.typing as npt

from core.exceptions import InvalidArgument, NonFiniteValue

StateVector = npt.NDArray[np.float64]

# float64 unit roundoff
UNIT_ROUNDOFF: float = float(np.finfo(np.float64).eps) / 2.0


def as_state(values: Union[Iterable[float], float, np.ndarray]) -> StateVector:
    """
    Convert values to a finite, read-only StateVector.

    Raises:
        InvalidArgument: if the result is not a non-empty 1-D vector
        NonFiniteValue: if any component is NaN or infinite
    """
    vector = np.array(values, dtype=np.float64, ndmin=1)
    if vector.ndim != 1 or vector.size == 0:
        raise InvalidArgument(f"state must be a non-empty 1-D vector, got shape {vector.shape}")
    ensure_finite(vector, "state")
    vector.setflags(write=False)
    return vector


def ensure_finite(values: np.ndarray, what: str = "value") -> None:
    if not np.all(np.isfinite(values)):
        raise NonFiniteValue(f"{what} has non-finite components: {np.asarray(values).tolist()}")


def norm_max(v: Union[StateVector, Iterable[float]]) -> float:
    """
    Maximum norm max_k |v_k|.

    Raises:
        NonFiniteValue: if any component is NaN or infinite
    """
    vector = np.asarray(v, dtype=np.float64)
    ensure_finite(vector, "norm argument")
    if vector.size == 0:
        return 0.0
    return float(np.max(np.abs(vector)))
