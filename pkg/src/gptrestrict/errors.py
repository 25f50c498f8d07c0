class GptError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(GptError, ValueError):
    """An argument lies outside the domain of an operation."""


class ValidationError(GptError, ValueError):
    """A model object violates one of its invariants."""

    def __init__(self, message: str, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class ResourceError(GptError):
    """A computation would exceed a configured size cap."""


class UnsupportedError(GptError):
    """The backend or dimension is outside what an operation supports."""
