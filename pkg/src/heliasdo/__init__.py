"""Disturbance-observer-based finite-time attitude control of a 3-DOF lab helicopter."""

from .errors import ConfigError, SimulationError
from .scenario import Scenario, TimeSeries, preset_case1, preset_case2, simulate

__all__ = [
    "ConfigError",
    "Scenario",
    "SimulationError",
    "TimeSeries",
    "preset_case1",
    "preset_case2",
    "simulate",
]
__version__ = "0.1.0"
