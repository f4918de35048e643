from services.experiment_service import ExperimentService
from models.interfaces import IProblemRepository
from repositories.problem_repository import ProblemRegistry

# The registry holds only builders, so one instance serves every command.
# Each lookup still returns fresh problems with their own counters.
problem_repository = ProblemRegistry()


def get_problem_repository() -> IProblemRepository:
    """
    Provides the problem repository.
    This allows us to swap the registry implementation in tests.
    """
    return problem_repository


def get_experiment_service() -> ExperimentService:
    """Dependency injection for ExperimentService."""
    return ExperimentService(get_problem_repository())
