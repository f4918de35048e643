import sys
from pathlib import Path

from dotenv import load_dotenv
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from helpers.dotenv_load_helper import find_env_file

project_root = Path(__file__).parent.parent
sys.path.append(str(project_root))

try:
    env_path = find_env_file()
    if env_path:
        load_dotenv(env_path)
except Exception as e:
    print(f"Error loading .env file: {e}", file=sys.stderr)


class Settings(BaseSettings):
    """
    Ambient settings (logging and harness caps). Solver parameters never
    come from the environment; they are passed as flags or SolverConfig.
    """

    model_config = SettingsConfigDict(env_prefix="PICARD_MESH_", extra="ignore")

    debug_mode: bool = Field(default=False, description="Enable DEBUG logs.")
    environment: str = Field(
        default="production", description="'development' enables colored logs."
    )
    default_max_steps: int = Field(
        default=1_000_000, description="Step cap used by the CLI.", ge=1
    )
    huge_max_steps: int = Field(
        default=100_000_000, description="Step cap used with --allow-huge.", ge=1
    )

    @property
    def use_colors(self) -> bool:
        return self.debug_mode or self.environment == "development"


settings = Settings()
