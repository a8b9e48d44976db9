"""Exception types raised across the package."""


class NetCournotError(Exception):
    """Base class for all package errors."""


class NetworkError(NetCournotError, ValueError):
    """Malformed or infeasible market network."""


class ParameterError(NetCournotError, ValueError):
    """Invalid game parameters or shock vector."""


class SingularSystemError(NetCournotError):
    """The system I + gamma*W could not be inverted to the required accuracy."""

    def __init__(self, message: str, residual_norm: float):
        super().__init__(message)
        self.residual_norm = residual_norm


class ConvergenceError(NetCournotError):
    """An iterative procedure did not reach its tolerance."""

    def __init__(self, message: str, last_change: float):
        super().__init__(message)
        self.last_change = last_change
