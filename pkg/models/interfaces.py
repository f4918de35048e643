from abc import ABC, abstractmethod
from typing import TYPE_CHECKING, List, Optional

from models.state import StateVector

if TYPE_CHECKING:
    from models.problems import IvpProblem, RegistryProblem


class IDenseApproximation(ABC):
    """
    A local approximation l_i evaluable on [x_i, x_{i+1}] with l_i(x_i) = y_i.
    """

    @abstractmethod
    def interval(self) -> tuple[float, float]:
        pass

    @abstractmethod
    def evaluate(self, t: float) -> StateVector:
        """
        Value of the approximation at t.

        Raises:
            OutOfRange: if t lies outside the interval beyond rounding slack
        """
        pass


class IOneStepMethod(ABC):
    """
    Contract for a one-step method pluggable into the general mesh controller.

    The method's local error is assumed to admit the bound
    bar_beta * (sup |z_i^{(r+1)}| / r! + beta) * h^{r+1}.
    """

    @property
    @abstractmethod
    def order(self) -> int:
        pass

    @property
    @abstractmethod
    def bar_beta(self) -> float:
        pass

    @property
    def beta(self) -> Optional[float]:
        """Declared beta; None means "use the configured beta"."""
        return None

    @property
    @abstractmethod
    def cost_per_step(self) -> int:
        """Functional evaluations needed for one step on a given mesh."""
        pass

    @abstractmethod
    def step(
        self,
        problem: "IvpProblem",
        x_i: float,
        x_next: float,
        y_i: StateVector,
    ) -> IDenseApproximation:
        """
        Compute the local approximation on [x_i, x_next] starting from y_i.
        Deterministic given identical inputs.
        """
        pass


class ILocalSolutionOracle(ABC):
    """Exact (or certified) solution of the local problem z' = f, z(x) = y."""

    @property
    @abstractmethod
    def provenance(self) -> str:
        """Either "closed_form" or "reference_integrator"."""
        pass

    @abstractmethod
    def solve(self, x: float, y: StateVector, t: float) -> StateVector:
        """
        Value at t >= x of the local solution through (x, y).

        Raises:
            OracleFailure: if the value cannot be produced
        """
        pass


class IProblemRepository(ABC):
    """
    Abstract access to the problem registry.

    Every lookup returns fresh problem instances, so evaluation counters are
    never shared between solves.
    """

    @abstractmethod
    def get(self, identifier: str, **params: float) -> "RegistryProblem":
        pass

    @abstractmethod
    def identifiers(self) -> List[str]:
        pass

    @abstractmethod
    def all(self) -> List["RegistryProblem"]:
        pass
