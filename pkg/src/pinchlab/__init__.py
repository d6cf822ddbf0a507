"""Finite-dimensional pinching, numerical range, idempotent and channel tools."""

__version__ = "0.1.0"

from . import channel, expectation, idempotent, linalg, numrange, pinching
from .errors import PinchlabError

__all__ = [
    "PinchlabError",
    "channel",
    "expectation",
    "idempotent",
    "linalg",
    "numrange",
    "pinching",
]
