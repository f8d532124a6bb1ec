"""Low Mach number limit lab for compressible Navier-Stokes/Cahn-Hilliard flows."""

from .config import Settings, get_settings
from .exceptions import LowMachError

__version__ = "0.1.0"

__all__ = ['Settings', 'get_settings', 'LowMachError', '__version__']
