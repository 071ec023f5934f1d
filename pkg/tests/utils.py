"""
Shared test utilities and helpers for the EMA test suite.

Constants mirror the reference configuration: a 16-microphone ring on a
0.0875 m sphere sampled at 48 kHz, encoded to order 4.
"""

import logging
import math

import numpy as np

from app.core.dsp import bin_frequencies
from app.core.pipeline import measure_transfer

# Set up logging
logger = logging.getLogger(__name__)

# Common test constants
DEFAULT_RADIUS = 0.0875
DEFAULT_FS = 48000
FIR_LENGTH = 2048
SIM_LENGTH = 8192
ORDER = 4
MIC_COUNT = 16
BAND_HZ = (200.0, 4000.0)

Y00 = 1 / math.sqrt(4 * math.pi)


def band_mask(fft_length: int, sample_rate: float, band=BAND_HZ) -> np.ndarray:
    freqs = bin_frequencies(fft_length, sample_rate)
    return (freqs >= band[0]) & (freqs <= band[1])


def in_band_transfer(signals, source, delay, fft_length=FIR_LENGTH, sample_rate=DEFAULT_FS, band=BAND_HZ):
    """Exact transfer functions of ``signals`` restricted to ``band``."""
    ratio = measure_transfer(signals, source, fft_length, delay)
    return ratio[:, band_mask(fft_length, sample_rate, band)]


def db(x) -> np.ndarray:
    return 20 * np.log10(np.abs(x))
