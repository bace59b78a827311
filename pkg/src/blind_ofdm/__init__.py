"""Blind second-order-statistics channel estimation for precoded OFDM.

Constellation splitting (right PAM half on even subcarriers, left half on
odd ones) plants a known 0/pi phase pattern in every frame, which resolves
the global phase left by covariance-based estimation without pilots.
"""

from . import channel, constellation, estimator, numerics, ofdm, precoder
from .errors import BlindOfdmError

__version__ = "0.1.0"

__all__ = ["BlindOfdmError", "channel", "constellation", "estimator", "numerics", "ofdm", "precoder"]
