"""State-space averaged model of a three-phase grid-connected voltage-fed inverter."""

from .errors import (
    ConfigError,
    DivergedError,
    InfeasibleDutyError,
    InfeasibleError,
    InfeasibleZeroSequenceError,
    NoOperatingPointError,
    PoleError,
    UsageError,
    VsiError,
)
from .params import REFERENCE, ConverterParams, dumps_params, load_params, loads_params, validate
from .steady_state import OperatingPoint, operating_point, residuals

__version__ = "0.1.0"

__all__ = [
    "REFERENCE",
    "ConfigError",
    "ConverterParams",
    "DivergedError",
    "InfeasibleDutyError",
    "InfeasibleError",
    "InfeasibleZeroSequenceError",
    "NoOperatingPointError",
    "OperatingPoint",
    "PoleError",
    "UsageError",
    "VsiError",
    "dumps_params",
    "load_params",
    "loads_params",
    "operating_point",
    "residuals",
    "validate",
]
