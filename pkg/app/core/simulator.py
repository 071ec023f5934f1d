"""Analytic plane-wave capture on the rigid-sphere equator.

A unit plane wave from azimuth theta in the horizontal plane has ambisonic
coefficients S_{n,m} = Y_{n,m}(pi/2, theta). The surface pressure at mic
azimuth alpha is sum_n sum_m S_{n,m} b_n(kR) N_{n,m}(pi/2) C_m(alpha).
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike

from app.core.config import settings
from app.core.dsp import bin_frequencies, hermitian_response
from app.core.errors import ConfigurationError, DomainError
from app.core.harmonics import acn, channel_count, circular_harmonic, equator_table
from app.core.radial import radial_term_kr, summed_orders
from app.core.sphmath import MAX_ORDER
from app.schemas.geometry import ArrayGeometry
from app.schemas.simulation import PlaneWaveSource, TruthCoefficient, TruthFile

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SimulationResult:
    mic_signals: np.ndarray
    truth_coeffs: np.ndarray
    source_signal: np.ndarray
    sample_rate: float
    truncation: int

    @property
    def order(self) -> int:
        return math.isqrt(self.truth_coeffs.size) - 1


def plane_wave_coefficients(theta: float, order: int, amplitude: float = 1.0) -> np.ndarray:
    """ACN vector of amplitude * N_{n,m}(pi/2) C_m(theta); parity zeros are exact."""
    table = equator_table(order)
    coeffs = np.zeros(channel_count(order))
    for n in range(order + 1):
        for m in range(-n, n + 1):
            if (n + abs(m)) % 2:
                continue
            coeffs[acn(n, m)] = amplitude * table.value(n, m) * circular_harmonic(m, theta)
    return coeffs


def truth_file(src: PlaneWaveSource, order: int) -> TruthFile:
    coeffs = plane_wave_coefficients(src.azimuth, order, src.amplitude)
    return TruthFile(
        azimuth_deg=math.degrees(src.azimuth),
        amplitude=src.amplitude,
        order=order,
        coefficients=[
            TruthCoefficient(acn=acn(n, m), n=n, m=m, value=float(coeffs[acn(n, m)]))
            for n in range(order + 1)
            for m in range(-n, n + 1)
        ],
    )


def default_truncation(geom: ArrayGeometry, sample_rate: float) -> int:
    """ceil(kR at Nyquist) + margin, capped at the special-function limit."""
    kr_max = math.pi * sample_rate * geom.radius / geom.speed_of_sound
    wanted = math.ceil(kr_max) + settings.SIMULATION_MARGIN
    if wanted > MAX_ORDER:
        logger.warning(
            "simulation truncation %d (kR_max=%.1f) capped at %d; the top of the band "
            "is less accurate", wanted, kr_max, MAX_ORDER,
        )
    return min(wanted, MAX_ORDER)


def _kr(omega: np.ndarray, geom: ArrayGeometry) -> np.ndarray:
    if np.any(~(omega > 0)):
        raise DomainError("surface pressure needs omega > 0")
    return omega * geom.radius / geom.speed_of_sound


def surface_pressure_spectrum(
    src: PlaneWaveSource,
    geom: ArrayGeometry,
    omega: ArrayLike,
    mic_index: int,
    truncation: int,
):
    """Pressure at mic ``mic_index``, summing over n first, then m."""
    omega = np.asarray(omega, dtype=float)
    kr = _kr(omega, geom)
    alpha = geom.mic_azimuths[mic_index]
    table = equator_table(truncation)
    total = np.zeros(omega.shape, dtype=complex)
    for n in range(truncation + 1):
        angular = 0.0
        for m in range(-n, n + 1):
            if (n + abs(m)) % 2:
                continue
            coefficient = table.value(n, m) * circular_harmonic(m, src.azimuth)
            angular += coefficient * table.value(n, m) * circular_harmonic(m, alpha)
        total = total + radial_term_kr(n, kr) * angular
    total = src.amplitude * total
    return total.item() if total.ndim == 0 else total


def ring_mode_spectrum(
    m: int, src: PlaneWaveSource, geom: ArrayGeometry, omega: ArrayLike, truncation: int
):
    """Mode-m ring spectrum C_m(theta) sum_{n>=|m|} b_n [N_{n,m}(pi/2)]^2 (times amplitude)."""
    kr = _kr(np.asarray(omega, dtype=float), geom)
    table = equator_table(truncation)
    strength = sum(
        radial_term_kr(int(n), kr) * table.value(int(n), m) ** 2
        for n in summed_orders(m, truncation)
    )
    return src.amplitude * circular_harmonic(m, src.azimuth) * strength


def pressure_transfer_functions(
    src: PlaneWaveSource, geom: ArrayGeometry, omega: ArrayLike, truncation: int
) -> np.ndarray:
    """(mics, frequencies) surface pressure, summed over m first.

    Uses C_m(a)C_m(t) + C_-m(a)C_-m(t) = 2 cos(m (a - t)) to pair the modes.
    """
    kr = _kr(np.asarray(omega, dtype=float), geom)
    table = equator_table(truncation)
    offsets = geom.mic_azimuths - src.azimuth
    radial = [radial_term_kr(n, kr) for n in range(truncation + 1)]
    out = np.zeros((geom.mic_count, kr.size), dtype=complex)
    for m in range(truncation + 1):
        strength = sum(radial[n] * table.value(int(n), m) ** 2 for n in summed_orders(m, truncation))
        weight = np.ones_like(offsets) if m == 0 else 2 * np.cos(m * offsets)
        out += weight[:, np.newaxis] * strength[np.newaxis, :]
    return src.amplitude * out


def source_waveform(src: PlaneWaveSource, sample_rate: float, length: int) -> np.ndarray:
    if src.signal == "impulse":
        wave = np.zeros(length)
        wave[0] = 1.0
        return wave
    if src.signal == "noise":
        return np.random.default_rng(settings.NOISE_SEED).standard_normal(length)
    frequency = float(src.signal.split(":", 1)[1])
    if frequency >= sample_rate / 2:
        raise DomainError(f"sine at {frequency} Hz is not below Nyquist ({sample_rate / 2} Hz)")
    return np.sin(2 * np.pi * frequency * np.arange(length) / sample_rate)


def simulate_capture(
    src: PlaneWaveSource,
    geom: ArrayGeometry,
    sample_rate: float,
    length: int,
    truncation: Optional[int] = None,
    order: Optional[int] = None,
    waveform: Optional[np.ndarray] = None,
) -> SimulationResult:
    """Microphone signals for the plane wave, plus its ideal ambisonic coefficients."""
    if length <= 0 or length & (length - 1):
        raise ConfigurationError(f"simulation length must be a power of two, got {length}")
    if truncation is None:
        truncation = default_truncation(geom, sample_rate)
    if order is None:
        order = geom.max_mode

    if waveform is None:
        waveform = source_waveform(src, sample_rate, length)
    elif waveform.shape != (length,):
        raise ConfigurationError(f"waveform must have {length} samples, got {waveform.shape}")

    freqs = bin_frequencies(length, sample_rate)
    transfer = np.empty((geom.mic_count, freqs.size), dtype=complex)
    # kR -> 0 limit: the sphere does not disturb the incident pressure
    transfer[:, 0] = 1.0
    unit = src.model_copy(update={"amplitude": 1.0})
    transfer[:, 1:] = pressure_transfer_functions(unit, geom, 2 * np.pi * freqs[1:], truncation)
    transfer = hermitian_response(transfer, length)

    spectrum = np.fft.rfft(waveform) * src.amplitude
    mic_signals = np.fft.irfft(transfer * spectrum[np.newaxis, :], n=length, axis=1)
    logger.info(
        "simulated plane wave from %.2f deg on %d mics (R=%.4f m, N_sim=%d, %d samples)",
        math.degrees(src.azimuth), geom.mic_count, geom.radius, truncation, length,
    )
    return SimulationResult(
        mic_signals=mic_signals,
        truth_coeffs=plane_wave_coefficients(src.azimuth, order, src.amplitude),
        source_signal=waveform,
        sample_rate=sample_rate,
        truncation=truncation,
    )
