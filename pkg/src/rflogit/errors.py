"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command-line front end.
"""


class RFLogitError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class InvalidArgumentError(RFLogitError, ValueError):
    exit_code = 2


class ParseError(RFLogitError, ValueError):
    """Malformed CSV input. ``row`` and ``column`` are 1-based file positions."""

    exit_code = 3

    def __init__(self, message, row=None, column=None):
        loc = []
        if row is not None:
            loc.append(f"row {row}")
        if column is not None:
            loc.append(f"column {column}")
        if loc:
            message = f"{message} ({', '.join(loc)})"
        super().__init__(message)
        self.row = row
        self.column = column


class DimensionError(RFLogitError, ValueError):
    exit_code = 4


class OutOfDomainError(DimensionError):
    """Evaluation point outside the basis domain."""


class SingularDesignError(DimensionError):
    """Least-squares design matrix is rank deficient."""


class SingleClassError(InvalidArgumentError):
    exit_code = 5


class SeparationError(RFLogitError, ArithmeticError):
    """Complete or quasi-complete separation: coefficients diverge."""

    exit_code = 6


class ConvergenceError(RFLogitError, ArithmeticError):
    """Iterative solver hit its iteration cap. ``last`` holds the final iterate."""

    exit_code = 7

    def __init__(self, message, last=None):
        super().__init__(message)
        self.last = last


class DegenerateScoresError(RFLogitError, ArithmeticError):
    """Every score column has zero robust dispersion."""

    exit_code = 7
