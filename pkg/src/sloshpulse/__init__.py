"""Haptic fluid rendering: vessel sloshing simulation driving a vibrotactile pulse engine."""

from sloshpulse.errors import (
    ConfigurationError,
    FormatError,
    InputError,
    SimulationFault,
)
from sloshpulse.vessel import VesselProfile, ActuatorLayout, builtin_profile
from sloshpulse.engine import TriggerConfig, PulseCommand

__all__ = [
    "ConfigurationError",
    "FormatError",
    "InputError",
    "SimulationFault",
    "VesselProfile",
    "ActuatorLayout",
    "builtin_profile",
    "TriggerConfig",
    "PulseCommand",
]

__version__ = "0.1.0"
