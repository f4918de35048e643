from typing import List, Optional

from core.exceptions import InvalidArgument
from core.settings import settings


def parse_float_list(text: str, name: str) -> List[float]:
    """
    Comma-separated floats, scientific notation allowed ("1e-2,1e-4").

    Raises:
        InvalidArgument: on an empty or malformed list
    """
    items = [item.strip() for item in text.split(",") if item.strip()]
    if not items:
        raise InvalidArgument(f"--{name} must list at least one value")
    try:
        return [float(item) for item in items]
    except ValueError as e:
        raise InvalidArgument(f"--{name} is not a list of numbers: {text!r}") from e


def parse_int_list(text: str, name: str) -> List[int]:
    values = parse_float_list(text, name)
    if any(value != int(value) for value in values):
        raise InvalidArgument(f"--{name} must list integers, got {text!r}")
    return [int(value) for value in values]


def resolve_max_steps(max_steps: Optional[int], allow_huge: bool) -> int:
    """Explicit cap, else the huge cap with --allow-huge, else the default cap."""
    if max_steps is not None:
        if max_steps > settings.default_max_steps and not allow_huge:
            raise InvalidArgument(
                f"--max-steps above {settings.default_max_steps} needs --allow-huge"
            )
        return max_steps
    return settings.huge_max_steps if allow_huge else settings.default_max_steps
