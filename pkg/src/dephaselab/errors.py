"""Exception types shared across the package."""


class DephaseLabError(Exception):
    """Base class for all package-specific errors."""


class NonIntegrable(DephaseLabError):
    """The integrand has a non-integrable endpoint singularity."""


class ToleranceNotMet(DephaseLabError):
    """A certified numerical result could not reach the requested tolerance."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class NotConverging(DephaseLabError):
    """Successive extrapolation estimates diverge."""


class DomainError(DephaseLabError):
    """Argument outside the mathematical domain of the operation."""


class ConvergenceFailure(DephaseLabError):
    """Dense eigensolver failed to converge."""


class UnsupportedRegime(DephaseLabError):
    """Coupling too singular for a finite-mode discretization."""


class DimensionCap(DephaseLabError):
    """Requested Hilbert-space dimension exceeds the enforced cap."""


class TruncationLeak(DephaseLabError):
    """Occupation-number truncation lost more probability mass than allowed."""

    def __init__(self, message, leakage=None):
        super().__init__(message)
        self.leakage = leakage


class InsufficientSamples(DephaseLabError):
    """Too few ensemble realizations for the requested estimate."""
