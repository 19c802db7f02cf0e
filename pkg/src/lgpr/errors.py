"""Exception hierarchy shared across the toolkit.

The CLI maps these onto exit codes: ParameterError -> 2,
DataError (and ConnectivityError) -> 3, NumericalError (and
DegenerateError) -> 4.
"""


class LgprError(Exception):
    """Base class for all toolkit errors."""


class ParameterError(LgprError, ValueError):
    """An argument or configuration value is out of range or inconsistent."""


class DataError(LgprError):
    """Input data is malformed or unusable."""


class ConnectivityError(DataError):
    """An operation needed reachability that the graph does not provide."""


class NumericalError(LgprError):
    """A numerical routine failed or left tolerance."""


class DegenerateError(NumericalError):
    """A quantity that must stay positive collapsed to (near) zero."""
