"""
Exception hierarchy.

Usage errors (bad parameters, partitions, grids) map to CLI exit code 2;
numerical failures (truncation ceiling reached, no photon to subtract,
broken operator contracts) map to exit code 1.
"""

from typing import Optional


class EvpsError(Exception):
    """Base class for every simulator error."""

    exit_code: int = 1

    def __init__(self, message: str, parameter: Optional[str] = None):
        super().__init__(message)
        self.parameter = parameter

    def __str__(self) -> str:
        message = super().__str__()
        if self.parameter:
            return f"{message} (parameter: {self.parameter})"
        return message


class UsageError(EvpsError, ValueError):
    """Invalid input supplied by the caller."""

    exit_code = 2


class InvalidSpaceError(UsageError):
    """Fock space with an unusable cutoff or mode count."""


class ShapeError(UsageError):
    """Operator or state dimension does not match its space."""


class InvalidPartitionError(UsageError):
    """Empty, overlapping or incomplete mode partition."""


class InvalidWiringError(UsageError):
    """Two-mode gate wired to the same mode twice or out of range."""


class ParameterError(UsageError):
    """Physical parameter outside its allowed range."""


class GridError(UsageError):
    """Sweep grid that is empty, unordered or violates divisibility."""


class ConfigError(UsageError):
    """Config file or flag combination that cannot be resolved."""


class NumericalError(EvpsError):
    """Failure of the numerical pipeline itself."""

    exit_code = 1


class ContractViolationError(NumericalError):
    """Matrix failed a Hermiticity or anti-Hermiticity contract."""


class NoPhotonError(NumericalError):
    """Subtraction from a state with no support on occupied levels."""


class CutoffTooSmallError(NumericalError):
    """Truncation at a cutoff loses more than the tolerance allows, or results never settle."""

    def __init__(self, message: str, cutoff: int, tail: float, parameter: Optional[str] = "cutoff"):
        super().__init__(message, parameter=parameter)
        self.cutoff = cutoff
        self.tail = tail
