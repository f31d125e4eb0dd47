"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class NumericalError(RuntimeError):
    """A numerical routine failed to converge.

    ``residual`` carries the last error estimate when one is available.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class UnsupportedProfileError(ValueError):
    """The profile lacks a property the operation relies on (e.g. monotonicity)."""


class OutOfHypothesisError(ValueError):
    """The inputs violate a hypothesis under which an estimate is stated."""


class NotApplicableError(ValueError):
    """The quantity is undefined for this manifold (e.g. no inner boundary)."""


class CapBuildError(RuntimeError):
    """Capping construction failed; ``violated`` names the failing inequality."""

    def __init__(self, message, violated=None):
        super().__init__(message)
        self.violated = violated


class ConfigError(ValueError):
    """Invalid family or CLI configuration."""
