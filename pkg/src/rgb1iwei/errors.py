"""Exception types shared across the package."""


class Rgb1IweiError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(Rgb1IweiError, ValueError):
    """A distribution parameter is nonpositive, nonfinite, or otherwise invalid."""


class DomainError(Rgb1IweiError, ValueError):
    """A function argument lies outside the mathematical domain."""


class ConvergenceError(Rgb1IweiError, RuntimeError):
    """An iterative routine failed to converge.

    Carries the iteration count so callers can report it instead of
    silently returning a bad value.
    """

    def __init__(self, message, iterations=None):
        if iterations is not None:
            message = f"{message} (after {iterations} iterations)"
        super().__init__(message)
        self.iterations = iterations


class SeriesDivergenceError(Rgb1IweiError, ArithmeticError):
    """A series evaluation failed its truncation rule under the Error policy."""


class MomentUndefinedError(Rgb1IweiError, ValueError):
    """A moment of order r >= theta was requested; it does not exist."""


class TailDegeneracyError(Rgb1IweiError, ArithmeticError):
    """The survival function underflowed to zero where a ratio needs it."""


class MaxPanelsExceededError(Rgb1IweiError, RuntimeError):
    """Adaptive quadrature hit its panel budget before reaching tolerance.

    The best available value and its error estimate are attached.
    """

    def __init__(self, message, value, estimate):
        super().__init__(message)
        self.value = value
        self.estimate = estimate


class NoConvergenceError(Rgb1IweiError, RuntimeError):
    """Every optimizer start failed; diagnostics are in the message."""


class NegativeLRError(Rgb1IweiError, ValueError):
    """The likelihood-ratio statistic is negative, signalling optimizer failure."""


class SingularInformationWarning(UserWarning):
    """Observed information was ill-conditioned; pseudo-inverse SEs reported."""


class DataError(Rgb1IweiError, ValueError):
    """Base class for dataset-loading problems."""


class ParseError(DataError):
    """A data line could not be parsed as a decimal number."""

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class EmptyDatasetError(DataError):
    """The data file contained no observations."""


class NonpositiveValueError(DataError):
    """An observation was zero or negative after scaling."""

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number
