class VtcError(Exception):
    """Base class for all package errors."""

    exit_code = 3


class ConfigError(VtcError):
    exit_code = 1


class DataValidationError(VtcError):
    exit_code = 2


class InvariantError(VtcError):
    exit_code = 3


class DegenerateInputError(VtcError):
    """Input for which a quantity is undefined (zero visual tokens, no segments, ...)."""

    exit_code = 2


class CalibrationError(VtcError):
    exit_code = 3
