"""
Locates the optional .env file that feeds core.settings.
"""

from pathlib import Path
from typing import Optional


def get_project_directory() -> Path:
    """
    Get the repository root (the directory holding main.py).

    Returns:
        Path: The project root directory
    """
    return Path(__file__).parent.parent


def find_env_file() -> Optional[Path]:
    """
    Find the .env file in the expected locations.
    Follows the order: project_dir/config/.env -> project_dir/.env -> None

    Returns:
        Optional[Path]: Path to .env file if found, None otherwise
    """
    project_dir = get_project_directory()

    env_locations = [
        project_dir / "config" / ".env",
        project_dir / ".env",
    ]

    for env_path in env_locations:
        if env_path.exists():
            return env_path

    return None
