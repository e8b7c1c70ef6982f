"""
Simulator Configuration Module

Type-safe process settings using Pydantic Settings.
Loads environment variables (prefix ``FEDJOBS_``) and an optional .env file.
Experiment parameters live in SimConfig documents, not here; these settings
only cover where output goes, how much is logged and batch defaults.

Usage:
    from fedjobs.config import get_settings

    settings = get_settings()
    out_dir = settings.output_dir
"""

import logging
from functools import lru_cache
from pathlib import Path

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

PACKAGE_ROOT = Path(__file__).parent
PROJECT_ROOT = PACKAGE_ROOT.parent
ENV_FILE = PROJECT_ROOT / ".env"
REFERENCE_CONFIG_PATH = PACKAGE_ROOT / "data" / "reference.yaml"

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


class Settings(BaseSettings):
    """
    Process-wide settings loaded from environment variables.

    Every field has a default; the environment only overrides.
    """

    model_config = SettingsConfigDict(
        env_prefix="FEDJOBS_",
        env_file=str(ENV_FILE),
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore"
    )

    # -----------------------------------------------------------------------------
    # Application Settings
    # -----------------------------------------------------------------------------
    log_level: str = "INFO"

    # -----------------------------------------------------------------------------
    # Experiment Output
    # -----------------------------------------------------------------------------
    output_dir: Path = Field(default=Path("results"), description="Default output directory")
    workers: int = Field(default=1, ge=1, description="Process-pool size for batch cells")

    # -----------------------------------------------------------------------------
    # Metric Defaults
    # -----------------------------------------------------------------------------
    convergence_epsilon: float = Field(default=0.005, gt=0.0)
    convergence_window: int = Field(default=10, ge=1)

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Accept any case; store the canonical upper-case level name."""
        level = v.upper()
        if level not in logging.getLevelNamesMapping():
            raise ValueError(f"Unknown log level: {v}")
        return level


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Return the process-wide settings instance."""
    return Settings()


def configure_logging(level: str | None = None) -> None:
    """Configure root logging once, at the CLI entry point."""
    level_name = (level or get_settings().log_level).upper()
    logging.basicConfig(
        level=getattr(logging, level_name),
        format=LOG_FORMAT,
        force=True,
    )
