"""Core module exports."""

from .cache import cached, get_cache, reset_cache
from .config import Settings, get_settings
from .errors import (
    ConfigError,
    ContractViolationError,
    CutoffTooSmallError,
    EvpsError,
    GridError,
    InvalidPartitionError,
    InvalidSpaceError,
    InvalidWiringError,
    NoPhotonError,
    NumericalError,
    ParameterError,
    ShapeError,
    UsageError,
)
from .logging import SweepLogger, get_logger, log_call, setup_logging

__all__ = [
    "get_settings",
    "Settings",
    "get_cache",
    "reset_cache",
    "cached",
    "setup_logging",
    "get_logger",
    "log_call",
    "SweepLogger",
    "EvpsError",
    "UsageError",
    "NumericalError",
    "InvalidSpaceError",
    "ShapeError",
    "InvalidPartitionError",
    "InvalidWiringError",
    "ParameterError",
    "GridError",
    "ConfigError",
    "ContractViolationError",
    "NoPhotonError",
    "CutoffTooSmallError",
]
