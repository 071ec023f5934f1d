"""Binaural rendering in the SH domain.

B^{L,R}(w) = sum_{n<=N} sum_m S_{n,m}(w) H^{L,R}_{n,m}(w), with the HRTF
coefficients realized as FIRs through the same path as the radial filters.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.spatial.distance import pdist

from app.core.config import settings
from app.core.dsp import (
    bin_frequencies,
    compensate,
    hermitian_response,
    ordered_map,
    overlap_save,
    realize_fir,
)
from app.core.encoder import AmbisonicSignalSet
from app.core.errors import ConditioningError, MismatchError, ShapeError
from app.core.harmonics import channel_count, sh_matrix
from app.core.radial import radial_term_kr

logger = logging.getLogger(__name__)

LEFT_EAR_AZIMUTH = math.pi / 2
RIGHT_EAR_AZIMUTH = -math.pi / 2


@dataclass(frozen=True)
class HrtfShSet:
    """SH coefficients per ear; ``coefficients[ear, acn, bin]`` on an rfft grid."""

    order: int
    coefficients: np.ndarray
    sample_rate: float
    fft_length: int
    fit_residual: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        expected = (2, channel_count(self.order), self.fft_length // 2 + 1)
        if self.coefficients.shape != expected:
            raise ShapeError(f"HRTF coefficients must have shape {expected}, got {self.coefficients.shape}")

    @property
    def left(self) -> np.ndarray:
        return self.coefficients[0]

    @property
    def right(self) -> np.ndarray:
        return self.coefficients[1]

    @property
    def modeling_delay(self) -> int:
        return self.fft_length // 2

    def truncated(self, order: int) -> "HrtfShSet":
        if order >= self.order:
            return self
        return replace(self, order=order, coefficients=self.coefficients[:, : channel_count(order)])


@dataclass(frozen=True)
class HrtfGrid:
    """Impulse responses ``irs[direction, ear, sample]`` at (colatitude, azimuth) directions."""

    directions: np.ndarray
    irs: np.ndarray
    sample_rate: float

    def __post_init__(self):
        if self.directions.ndim != 2 or self.directions.shape[1] != 2:
            raise ShapeError(f"directions must be (count, 2), got {self.directions.shape}")
        if self.irs.ndim != 3 or self.irs.shape[:2] != (self.directions.shape[0], 2):
            raise ShapeError(
                f"impulse responses must be ({self.directions.shape[0]}, 2, length), got {self.irs.shape}"
            )

    @property
    def ir_length(self) -> int:
        return self.irs.shape[2]


def _unit_vectors(directions: np.ndarray) -> np.ndarray:
    colat, azi = directions[:, 0], directions[:, 1]
    return np.stack(
        [np.sin(colat) * np.cos(azi), np.sin(colat) * np.sin(azi), np.cos(colat)], axis=1
    )


def hrtf_sh_transform(grid: HrtfGrid, order: int) -> HrtfShSet:
    """Per-bin least-squares SH coefficients of a grid of HRTFs."""
    n_coeffs = channel_count(order)
    n_dirs = grid.directions.shape[0]
    if n_dirs < n_coeffs:
        raise ConditioningError(f"{n_dirs} directions cannot determine {n_coeffs} coefficients")
    if n_dirs > 1 and np.min(pdist(_unit_vectors(grid.directions))) < 1e-9:
        raise ConditioningError("HRTF grid contains duplicate directions")

    basis = sh_matrix(order, grid.directions[:, 0], grid.directions[:, 1])
    condition = float(np.linalg.cond(basis))
    if not condition <= settings.CONDITION_LIMIT:
        raise ConditioningError(
            f"SH matrix of order {order} on {n_dirs} directions has condition number {condition:.3g}",
            condition_number=condition,
        )

    spectra = np.fft.rfft(grid.irs, axis=2)
    coefficients = np.empty((2, n_coeffs, spectra.shape[2]), dtype=complex)
    residual = np.empty((2, spectra.shape[2]))
    for ear in range(2):
        target = spectra[:, ear, :]
        solution, *_ = np.linalg.lstsq(basis.astype(complex), target, rcond=None)
        coefficients[ear] = solution
        error = np.linalg.norm(basis @ solution - target, axis=0)
        scale = np.linalg.norm(target, axis=0)
        residual[ear] = np.divide(error, scale, out=np.zeros_like(error), where=scale > 0)
    logger.info(
        "SH transform of %d directions to order %d (cond %.3g, max relative residual %.3g)",
        n_dirs, order, condition, float(residual.max()),
    )
    return HrtfShSet(
        order=order,
        coefficients=hermitian_response(coefficients, grid.ir_length),
        sample_rate=grid.sample_rate,
        fft_length=grid.ir_length,
        fit_residual=residual,
    )


def synthesize_grid(hrtf: HrtfShSet, colatitudes: np.ndarray, azimuths: np.ndarray) -> HrtfGrid:
    """Sample the SH-expanded HRTFs at the given directions."""
    basis = sh_matrix(hrtf.order, colatitudes, azimuths)
    spectra = np.einsum("dc,ecb->deb", basis, hermitian_response(hrtf.coefficients, hrtf.fft_length))
    return HrtfGrid(
        directions=np.stack([np.atleast_1d(colatitudes), np.atleast_1d(azimuths)], axis=1).astype(float),
        irs=np.fft.irfft(spectra, n=hrtf.fft_length, axis=2),
        sample_rate=hrtf.sample_rate,
    )


def analytic_test_hrtf(
    order: int,
    sample_rate: float,
    fft_length: int,
    radius: Optional[float] = None,
    speed_of_sound: Optional[float] = None,
) -> HrtfShSet:
    """Rigid-sphere HRTFs with pseudo-ears on the equator at azimuth +90 (left) and -90 (right).

    The pressure at ear e for a plane wave from direction d is
    sum_{n,m} Y_{n,m}(d) b_n(kR) Y_{n,m}(e), so H_{n,m} = b_n(kR) Y_{n,m}(e).
    """
    radius = settings.DEFAULT_RADIUS_M if radius is None else radius
    speed_of_sound = settings.SPEED_OF_SOUND if speed_of_sound is None else speed_of_sound
    freqs = bin_frequencies(fft_length, sample_rate)
    kr = 2 * np.pi * freqs[1:] * radius / speed_of_sound

    ears = sh_matrix(order, np.full(2, np.pi / 2), np.array([LEFT_EAR_AZIMUTH, RIGHT_EAR_AZIMUTH]))
    radial = np.zeros((order + 1, freqs.size), dtype=complex)
    # kR -> 0: only b_0 survives, with limit 4 pi
    radial[0, 0] = 4 * np.pi
    for n in range(order + 1):
        radial[n, 1:] = radial_term_kr(n, kr)
    orders = np.array([n for n in range(order + 1) for _ in range(2 * n + 1)])
    coefficients = ears[:, :, np.newaxis] * radial[orders][np.newaxis, :, :]
    return HrtfShSet(
        order=order,
        coefficients=hermitian_response(coefficients, fft_length),
        sample_rate=sample_rate,
        fft_length=fft_length,
    )


def omnidirectional_hrtf(sample_rate: float, fft_length: int, order: int = 0) -> HrtfShSet:
    """H_{0,0} = sqrt(4 pi) at every bin, all other coefficients zero."""
    coefficients = np.zeros((2, channel_count(order), fft_length // 2 + 1), dtype=complex)
    coefficients[:, 0, :] = math.sqrt(4 * math.pi)
    return HrtfShSet(order=order, coefficients=coefficients, sample_rate=sample_rate, fft_length=fft_length)


def render_binaural(
    ambi: AmbisonicSignalSet, hrtf: HrtfShSet, compensate_delay: bool = False
) -> tuple[np.ndarray, int]:
    """Ear signals (2, samples) and their latency in samples.

    Channels are summed in ascending ACN order so the result is reproducible.
    """
    if not math.isclose(ambi.sample_rate, hrtf.sample_rate):
        raise MismatchError(
            f"ambisonic sample rate {ambi.sample_rate} Hz differs from HRTF {hrtf.sample_rate} Hz"
        )
    order = min(ambi.order, hrtf.order)
    if ambi.order != hrtf.order:
        logger.warning(
            "rendering at order %d (ambisonics order %d, HRTF order %d)", order, ambi.order, hrtf.order
        )
    n_channels = channel_count(order)

    def convolve(pair: tuple[int, int]) -> np.ndarray:
        ear, c = pair
        # each (ear, channel) filter is realized on its own
        response = hermitian_response(hrtf.coefficients[ear, c], hrtf.fft_length)
        fir = realize_fir(response, hrtf.fft_length, hrtf.modeling_delay)
        return overlap_save(ambi.channels[c][np.newaxis, :], fir)[0]

    pairs = [(ear, c) for ear in range(2) for c in range(n_channels)]
    rows = ordered_map(convolve, pairs)
    ears = np.zeros((2, ambi.length + hrtf.fft_length - 1))
    for (ear, _), row in zip(pairs, rows, strict=True):
        ears[ear] += row

    latency = ambi.latency_samples + hrtf.modeling_delay
    if compensate_delay:
        ears = compensate(ears, hrtf.modeling_delay, ambi.length)
        latency = ambi.latency_samples
    logger.info("rendered order-%d ambisonics to %d binaural samples", order, ears.shape[1])
    return ears, latency
