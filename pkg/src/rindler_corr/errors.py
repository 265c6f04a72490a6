"""Exception hierarchy shared by every module of the package."""


class RindlerCorrError(Exception):
    """Base class for all errors raised by :mod:`rindler_corr`."""


class DomainError(RindlerCorrError, ValueError):
    """An input lies outside the domain of the requested operation."""


class CapacityError(RindlerCorrError):
    """The dense oracle would exceed its configured tensor-size cap."""


class ConvergenceError(RindlerCorrError, ArithmeticError):
    """An iterative eigensolver failed to converge."""


class BracketError(RindlerCorrError, ValueError):
    """A root-finding bracket does not straddle a sign change.

    The sampled points are attached for diagnostics.
    """

    def __init__(self, message, samples=()):
        super().__init__(message)
        self.samples = list(samples)

    def __str__(self):
        base = super().__str__()
        if not self.samples:
            return base
        shown = ", ".join(f"f({x:.6g})={y:.3e}" for x, y in self.samples[:12])
        return f"{base}; samples: {shown}"


class ConfigError(RindlerCorrError, ValueError):
    """A sweep or figure configuration field is invalid."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class VerificationError(RindlerCorrError):
    """A closed-form result disagrees with the oracle beyond tolerance."""
