"""Exception taxonomy shared across the package.

Exit codes used by the CLI: 0 success, 2 argument error, 3 parse error,
4 numerical/convergence error.
"""


class HoneyHsiError(Exception):
    """Base class for all package errors."""


class ShapeError(HoneyHsiError, ValueError):
    """Operands have incompatible or invalid dimensions."""


class ArgumentError(HoneyHsiError, ValueError):
    """A caller-supplied argument violates its contract."""


class DomainError(HoneyHsiError, ValueError):
    """A numeric argument is outside the function's domain."""


class ParseError(HoneyHsiError, ValueError):
    """Malformed input file. Carries row/column context when known."""

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class BandCountError(ParseError):
    """Sample rows do not carry the expected number of band columns."""


class MissingLabelError(HoneyHsiError, KeyError):
    """A requested origin/brand/class label is not present."""


class NotPositiveDefiniteError(HoneyHsiError, ArithmeticError):
    """Cholesky factorization hit a non-positive pivot."""


class SingularMatrixError(HoneyHsiError, ArithmeticError):
    """Triangular solve hit a zero diagonal entry."""


class ConvergenceError(HoneyHsiError, RuntimeError):
    """An iterative solver exhausted its iteration budget."""


class FitError(HoneyHsiError, RuntimeError):
    """Model fitting received data it cannot be trained on."""


EXIT_OK = 0
EXIT_ARGUMENT = 2
EXIT_PARSE = 3
EXIT_NUMERICAL = 4


def exit_code_for(exc: BaseException) -> int:
    """Map an exception to the CLI exit code contract."""
    if isinstance(exc, ParseError):
        return EXIT_PARSE
    if isinstance(exc, (ArgumentError, DomainError, MissingLabelError, ShapeError)):
        return EXIT_ARGUMENT
    if isinstance(
        exc,
        (NotPositiveDefiniteError, SingularMatrixError, ConvergenceError, FitError),
    ):
        return EXIT_NUMERICAL
    return 1
