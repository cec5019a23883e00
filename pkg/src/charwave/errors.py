"""Exception hierarchy shared by every module."""


class CharwaveError(Exception):
    """Base class for all package errors."""


class DomainError(CharwaveError, ValueError):
    """A point or time lies outside the set where an object is defined."""


class RangeError(CharwaveError, ValueError):
    """A value lies outside the range of a monotone map."""


class HorizonExceeded(CharwaveError):
    """A computation needs times beyond the certified horizon."""


class NonConvergence(CharwaveError):
    """An iterative numerical procedure failed to converge."""


class GeometryError(NonConvergence):
    """A ray could not be bracketed against a boundary curve."""


class RunawayError(NonConvergence):
    """A ray trace needed an unreasonable number of reflections."""


class FeedbackSingularity(CharwaveError, ValueError):
    """The reflection coefficient is undefined because 1 + f(t) = 0."""


class ValidationFailure(CharwaveError, ValueError):
    """Input failed validation; carries an optional report."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class PreconditionError(ValidationFailure):
    """An operation was called with inputs violating its preconditions."""


class IncreasingConditionError(PreconditionError):
    """The reflection map does not push every point strictly forward."""
