"""Exception types shared across the package."""


class GevrError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(GevrError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class DataError(GevrError, ValueError):
    """Input data violates a structural requirement (ordering, ties, shape)."""


class ParseError(DataError):
    """A raw input file could not be parsed; carries location information."""

    def __init__(self, message, line=None, row=None, column=None):
        super().__init__(message)
        self.line = line
        self.row = row
        self.column = column


class EmptyOutputError(DataError):
    """An extraction produced no usable blocks."""


class UnfittableDataError(GevrError):
    """Every starting point for the optimizer had zero likelihood."""


class ConditioningError(GevrError):
    """A matrix needed by the procedure is singular or indefinite."""

    def __init__(self, message, eigenvalues=None):
        super().__init__(message)
        self.eigenvalues = eigenvalues


class BracketExhaustedError(GevrError):
    """A root search exhausted its bracket; carries the bracket tried."""

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket


class ReliabilityError(GevrError):
    """Too many bootstrap replicates failed for the p-value to be trusted."""

    def __init__(self, message, failure_rate=None):
        super().__init__(message)
        self.failure_rate = failure_rate


class DegenerateTruncationError(DomainError):
    """Truncation point carries zero probability mass."""


class DegenerateStatisticError(GevrError):
    """A test statistic is undefined (for example, zero sample variance)."""


class UnsupportedOrderError(DomainError):
    """The requested order r is not supported by this test."""
