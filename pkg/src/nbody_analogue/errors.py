"""Exception and warning types shared across the package.

Each exception class carries the process exit code the command line
front end reports for it.
"""


class AnalogueError(Exception):
    """Base class for all package errors."""

    exit_code = 1

    def __init__(self, message: str, body: int | None = None):
        super().__init__(message)
        self.body = body


class ConfigError(AnalogueError):
    """Unreadable configuration or schema violation."""

    exit_code = 2


class DegenerateInputError(AnalogueError):
    """Geometry the reduction cannot handle (coincident points, zero angular rate)."""

    exit_code = 3


class UnboundedOrbitError(AnalogueError):
    """Closed-form or periodic operation requested on a parabolic/hyperbolic orbit,
    or an angle sweep that leaves the reachable arc."""

    exit_code = 4


class OracleAbort(AnalogueError):
    """Close encounter or non-finite state during direct integration."""

    exit_code = 5

    def __init__(self, message: str, time: float, body: int | None = None):
        super().__init__(message, body)
        self.time = time


class ConvergenceError(AnalogueError):
    """Quadrature or root bracketing did not reach its tolerance."""

    exit_code = 6


class ValidityWarning(UserWarning):
    """Input lies outside the region where the two-body reduction is expected to hold."""
