"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, DataError -> 3,
NumericError -> 4.
"""


class FuseError(Exception):
    """Base class for all riskfuse errors."""


class ConfigError(FuseError):
    """Invalid configuration or command-line arguments."""


class DataError(FuseError):
    """Malformed or insufficient input data."""


class NumericError(FuseError):
    """Invalid parameter values or failed numeric procedures."""
