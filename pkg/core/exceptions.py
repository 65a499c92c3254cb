"""Exception hierarchy for the cumulative entropy toolkit."""

from typing import Optional


class EntropyToolkitError(Exception):
    """Base class for every error raised by the toolkit."""


class SpecParseError(EntropyToolkitError):
    """Distribution spec text could not be parsed."""

    def __init__(self, message: str, position: int = 0):
        self.position = position
        super().__init__(f"{message} (at position {position})")


class InvalidParameterError(EntropyToolkitError):
    """Distribution parameters rejected at construction."""


class DomainError(EntropyToolkitError):
    """Argument outside the domain of an operation."""


class CapabilityError(EntropyToolkitError):
    """The distribution lacks a capability the operation needs (pdf, non-negative support)."""


class MomentUndefinedError(EntropyToolkitError):
    """A moment integral did not converge; the moment is treated as undefined."""


class DegenerateLawError(EntropyToolkitError):
    """Standardisation requested for a law with zero variance."""


class IngestionError(EntropyToolkitError):
    """Sample data could not be turned into an empirical distribution."""


class IntegrationError(EntropyToolkitError):
    """Quadrature failed; `best` carries the best available estimate."""

    def __init__(self, message: str, best: Optional["IntegralResult"] = None):  # noqa: F821
        self.best = best
        super().__init__(message)


class IntegrandNaNError(IntegrationError):
    """The integrand returned NaN."""

    def __init__(self, abscissa: float):
        self.abscissa = abscissa
        super().__init__(f"integrand returned NaN at x = {abscissa!r}")
