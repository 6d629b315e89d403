"""Numerical laboratory for chaos in non-autonomous discrete systems."""

__version__ = "0.1.0"

from .dynamics import NDSystem, iterate_system, orbit, orbit_batch
from .errors import NDSError
from .metrics import classify_pair, distribution_estimate, li_yorke_test, pair_profile
from .spaces import INTERVAL, SHIFT1, SHIFT2, SQUARE

__all__ = [
    "INTERVAL",
    "NDSError",
    "NDSystem",
    "SHIFT1",
    "SHIFT2",
    "SQUARE",
    "classify_pair",
    "distribution_estimate",
    "iterate_system",
    "li_yorke_test",
    "orbit",
    "orbit_batch",
    "pair_profile",
]
