"""Quasi-uniformity of digital nets over prime fields."""

from .constructions import NetSpec
from .geometry import analyze, covering_radius_bracket, separation_radius
from .pointgen import NetPoints, ShiftVector, digital_shift, generate_points

__all__ = [
    "NetSpec",
    "NetPoints",
    "ShiftVector",
    "analyze",
    "covering_radius_bracket",
    "digital_shift",
    "generate_points",
    "separation_radius",
]

__version__ = "0.1.0"
