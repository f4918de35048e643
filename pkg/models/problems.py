"""
Domain Layer: initial value problems z' = f(t, z), z(a) = eta on [a, b].
"""

from typing import Callable, Dict, Set, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from core.exceptions import DomainViolation, InvalidArgument, PicardMeshError
from models.interfaces import ILocalSolutionOracle
from models.state import StateVector, as_state

RightHandSide = Callable[[float, StateVector], object]


class IvpProblem:
    """
    Right-hand side f, interval [a, b] and initial value eta, with
    instrumented evaluation counting.

    ``eval_count`` grows by exactly one per rhs evaluation.
    ``distinct_eval_count`` grows only for arguments not seen since the last
    ``begin_step()``; it is what a per-step memo would have paid.

    A problem instance belongs to one solve at a time.
    """

    def __init__(
        self,
        rhs: RightHandSide,
        a: float,
        b: float,
        eta,
        name: str = "custom",
    ):
        if not (np.isfinite(a) and np.isfinite(b)) or not a < b:
            raise InvalidArgument(f"interval needs finite a < b, got [{a}, {b}]")
        self.rhs = rhs
        self.a = float(a)
        self.b = float(b)
        self.eta = as_state(eta)
        self.name = name
        self.eval_count = 0
        self.distinct_eval_count = 0
        self._seen: Set[Tuple[float, bytes]] = set()

    @property
    def dimension(self) -> int:
        return self.eta.shape[0]

    def reset_counter(self) -> None:
        self.eval_count = 0
        self.distinct_eval_count = 0
        self._seen.clear()

    def begin_step(self) -> None:
        """Forget the arguments seen so far (memo scope is one step)."""
        self._seen.clear()

    def evaluate(self, t: float, y: StateVector) -> StateVector:
        """
        Evaluate f(t, y) and count it.

        Raises:
            DomainViolation: if f rejects (t, y), fails arithmetically or
                returns a non-finite or wrongly shaped value
        """
        self.eval_count += 1
        key = (float(t), np.asarray(y, dtype=np.float64).tobytes())
        if key not in self._seen:
            self._seen.add(key)
            self.distinct_eval_count += 1

        try:
            with np.errstate(all="ignore"):
                value = np.asarray(self.rhs(t, y), dtype=np.float64).reshape(-1)
        except PicardMeshError:
            raise
        except (ArithmeticError, ValueError) as e:
            raise DomainViolation(f"rhs of '{self.name}' failed: {e}", t, y) from e

        if value.shape[0] != self.dimension:
            raise DomainViolation(
                f"rhs of '{self.name}' returned {value.shape[0]} components, expected {self.dimension}",
                t,
                y,
            )
        if not np.all(np.isfinite(value)):
            raise DomainViolation(f"rhs of '{self.name}' returned a non-finite value", t, y)
        return value


class RegistryProblem(BaseModel):
    """
    A problem together with its exact local-solution oracle.
    args:
        identifier (str): registry id, e.g. "test" or "exp"
        problem (IvpProblem): fresh, uncounted problem instance
        oracle (ILocalSolutionOracle): local solution z_{x,y}(t)
        smoothness_note (str): where f is smooth
        params (dict): parameters the instance was built with
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    identifier: str = Field(..., description="Registry identifier.")
    problem: IvpProblem = Field(..., description="The initial value problem.")
    oracle: ILocalSolutionOracle = Field(..., description="Local solution oracle.")
    smoothness_note: str = Field(default="", description="Smoothness of f.")
    params: Dict[str, float] = Field(default_factory=dict)

    @property
    def label(self) -> str:
        if not self.params:
            return self.identifier
        rendered = ",".join(f"{k}={v:g}" for k, v in sorted(self.params.items()))
        return f"{self.identifier}({rendered})"

