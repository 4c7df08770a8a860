"""Exception and warning types shared across the package."""


class GapClustError(Exception):
    """Base class for all errors raised by this package."""


class InputError(GapClustError):
    """Raised for unusable input data (wrong feature types, empty dataset, ...)."""


class ParseError(InputError):
    """Raised when a data file cannot be parsed.

    Carries the 1-based row number of the offending record when known.
    """

    def __init__(self, message, row=None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row


class ParameterError(GapClustError, ValueError):
    """Raised for invalid parameter values (non-positive sigma, k out of range, ...)."""


class ConvergenceWarning(UserWarning):
    """Emitted when message passing hits the iteration cap without converging."""
