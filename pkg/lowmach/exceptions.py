"""Shared exceptions for the lowmach package."""

from typing import Optional


class LowMachError(Exception):
    """Base exception for all lowmach errors."""
    pass


class ConfigError(LowMachError):
    """Raised when configuration is invalid or cannot be parsed."""
    pass


class GridError(LowMachError):
    """Raised when a grid is invalid or fields do not match their grid."""
    pass


class ParameterError(LowMachError):
    """Raised when a constitutive or numerical precondition is violated."""
    pass


class DensityFloorError(LowMachError):
    """Raised when the density drops below the floor during a step."""

    def __init__(self, message: str, time: Optional[float] = None, min_density: Optional[float] = None):
        super().__init__(message)
        self.time = time
        self.min_density = min_density


class SolverConvergenceError(LowMachError):
    """Raised when a Krylov solve does not reach its tolerance."""

    def __init__(self, message: str, iterations: int = 0, residual: float = float("nan")):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class RunAbortedError(LowMachError):
    """Raised when a time-stepping run fails; carries the failing time."""

    def __init__(self, message: str, time: float):
        super().__init__(message)
        self.time = time


class TrajectoryError(LowMachError):
    """Raised when a trajectory is too short or a time range is invalid."""
    pass


class AcceptanceError(LowMachError):
    """Raised when an acceptance check fails."""
    pass


class OutputError(LowMachError):
    """Raised when output files cannot be written or read."""

    def __init__(self, message: str, path: Optional[str] = None):
        super().__init__(f"{message} ({path})" if path else message)
        self.path = path
