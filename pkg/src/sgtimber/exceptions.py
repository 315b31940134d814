"""Exception types raised across the package."""


class SgTimberError(Exception):
    """Base class for all errors raised by sgtimber."""


class InvalidCountError(SgTimberError, ValueError):
    pass


class InvalidLevelError(SgTimberError, ValueError):
    pass


class OutOfDomainError(SgTimberError, ValueError):
    """A point lies outside the domain an operation is defined on."""


class InvalidSetError(SgTimberError, ValueError):
    """A multi-index set violates a precondition (empty, not downward-closed)."""


class InvalidConfigurationError(SgTimberError, ValueError):
    pass


class InvalidIndexError(SgTimberError, IndexError):
    pass


class UnsupportedDegreeError(SgTimberError, ValueError):
    pass


class SolverFailureError(SgTimberError, RuntimeError):
    """The collocation system could not be solved reliably."""

    def __init__(self, message, rcond=None, size=None):
        super().__init__(message)
        self.rcond = rcond
        self.size = size


class DegenerateError(SgTimberError, ValueError):
    """Zero variance, zero reference norm, identical samples and the like."""


class BudgetTooSmallError(SgTimberError, ValueError):
    pass


class ModelEvaluationError(SgTimberError, RuntimeError):
    """The black-box model failed at a parameter point.

    The offending point (and multi-index, when known) is attached so the
    failing configuration can be reproduced.
    """

    def __init__(self, point, cause, index=None):
        where = f" (multi-index {tuple(index)})" if index is not None else ""
        super().__init__(f"model evaluation failed at p={list(point)}{where}: {cause!r}")
        self.point = point
        self.index = index
        self.cause = cause
