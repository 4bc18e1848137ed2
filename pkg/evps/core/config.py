"""
Configuration Management Module

Uses pydantic-settings for environment variable handling.
Supports both .env file and EVPS_-prefixed environment variables.
"""

from functools import lru_cache
from pathlib import Path
from typing import Literal, Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Simulator settings with pydantic-settings."""

    # Application
    app_name: str = "evps-sim"
    app_version: str = "0.1.0"

    # Numerics
    default_cutoff: int = Field(default=8, ge=2)
    cutoff_step: int = Field(default=2, ge=1)
    cutoff_ceiling: int = Field(default=48, ge=2)
    direct_cutoff_ceiling: int = Field(default=24, ge=2)
    direct_max_modes: int = Field(default=5, ge=1)
    tail_tolerance: float = 1e-10
    convergence_tolerance: float = 2e-7
    mixture_floor: float = 1e-16
    support_tolerance: float = 1e-20
    hermitian_tolerance: float = 1e-10
    unitary_tolerance: float = 1e-9
    no_photon_threshold: float = 1e-14
    gain_floor: float = 1e-12
    negativity_clamp: float = 1e-9
    hierarchy_slack: float = 1e-8

    # Sweeps
    default_r: float = 0.2
    jobs: int = Field(default=1, ge=1)
    output_dir: str = "results"
    tap_reflectivity: float = Field(default=1.0, ge=0.0, le=1.0)

    # Cache
    cache_enabled: bool = True
    cache_max_entries: int = Field(default=256, ge=1)

    # Logging
    log_level: str = "INFO"
    log_format: Literal["json", "console"] = "json"
    log_file: Optional[str] = None

    model_config = SettingsConfigDict(
        env_prefix="EVPS_",
        env_file=Path(__file__).parent.parent.parent / ".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore"
    )


@lru_cache()
def get_settings() -> Settings:
    """
    Get cached settings instance.

    Settings are read once per process; numerical code treats them as
    read-only defaults and accepts explicit keyword overrides.
    """
    return Settings()
