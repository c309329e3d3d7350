"""Exception hierarchy shared by the library and the command line.

Each exception carries the process exit code the CLI maps it to, so library code can raise
typed errors and only ``impatience.main`` decides how the process ends.
"""
from typing import Any

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ACCEPTANCE = 2
EXIT_DIVERGENCE = 3


class ImpatienceError(Exception):
    """Base class for every error raised by the package."""

    exit_code: int = EXIT_USAGE

    def __init__(self, message: str, **details: Any) -> None:
        super().__init__(message)
        self.message = message
        self.details = details

    def __str__(self) -> str:
        if not self.details:
            return self.message
        extra = ", ".join(f"{key}={value!r}" for key, value in sorted(self.details.items()))
        return f"{self.message} ({extra})"


class ConfigurationError(ImpatienceError, ValueError):
    """Invalid parameters or parameter combinations."""


class InfeasibleRatesError(ConfigurationError):
    """Heterogeneity offset yields a non-positive service rate."""


class UnboundedGrowthError(ConfigurationError):
    """Arrivals ahead of a jockey outpace the drain rate, so no equilibrium form exists."""


class NumericalError(ImpatienceError, ArithmeticError):
    """A numerical routine cannot meet its tolerance."""


class SeriesOverflowError(NumericalError):
    """Poisson mixture needs more terms than the configured budget."""


class DivergenceError(ImpatienceError, FloatingPointError):
    """Network outputs or gradients became non-finite during training."""

    exit_code = EXIT_DIVERGENCE


class AcceptanceError(ImpatienceError):
    """A documented acceptance threshold was not met."""

    exit_code = EXIT_ACCEPTANCE


class TraceError(ImpatienceError, ValueError):
    """A simulation trace is malformed."""


class FeedError(ImpatienceError):
    """An information feed failed or is not ready to answer."""
