from .series import (
    Curve,
    DensityPath,
    FluctPath,
    PriceSeries,
    RecurrenceMap,
    ReturnSamples,
    VolatilitySeries,
)
from .trajectory import Trajectory

__all__ = [
    "Trajectory",
    "DensityPath",
    "FluctPath",
    "PriceSeries",
    "ReturnSamples",
    "RecurrenceMap",
    "VolatilitySeries",
    "Curve",
]
