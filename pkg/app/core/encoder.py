"""Equatorial-array encoder: ring analysis, per-mode equalization, expansion to ACN/N3D."""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Literal, Optional, Union

import numpy as np

from app.core.dsp import compensate, ordered_map, overlap_save
from app.core.errors import GeometryError, IndexRangeError, MismatchError, ShapeError
from app.core.harmonics import EquatorFactorTable, acn, channel_count, circular_harmonic, equator_table
from app.core.radial import EqualizationFilterBank
from app.schemas.geometry import ArrayGeometry

logger = logging.getLogger(__name__)

SignalInput = Union[np.ndarray, Sequence[np.ndarray]]


@dataclass(frozen=True)
class RingSpectra:
    """Circular-harmonic signals of the ring; row m + max_mode holds mode m."""

    modes: np.ndarray
    max_mode: int
    sample_rate: float
    latency_samples: int = 0

    def __post_init__(self):
        if self.modes.shape[0] != 2 * self.max_mode + 1:
            raise ShapeError(
                f"{self.modes.shape[0]} mode signals for max_mode {self.max_mode}"
            )
        if not self.sample_rate > 0:
            raise ShapeError(f"sample rate must be positive, got {self.sample_rate}")
        self.modes.setflags(write=False)

    def mode(self, m: int) -> np.ndarray:
        if abs(m) > self.max_mode:
            raise IndexRangeError(f"mode {m} outside ring of max_mode {self.max_mode}")
        return self.modes[m + self.max_mode]

    @property
    def length(self) -> int:
        return self.modes.shape[1]


@dataclass(frozen=True)
class AmbisonicSignalSet:
    """(order+1)^2 time signals in ACN order with N3D normalization."""

    order: int
    channels: np.ndarray
    sample_rate: float
    latency_samples: int = 0
    normalization: Literal["N3D"] = "N3D"
    channel_ordering: Literal["ACN"] = "ACN"

    def __post_init__(self):
        if self.channels.ndim != 2 or self.channels.shape[0] != channel_count(self.order):
            raise ShapeError(
                f"order {self.order} needs {channel_count(self.order)} channels, "
                f"got array of shape {self.channels.shape}"
            )

    def channel(self, n: int, m: int) -> np.ndarray:
        return self.channels[acn(n, m)]

    @property
    def length(self) -> int:
        return self.channels.shape[1]


def _as_matrix(mic_signals: SignalInput) -> np.ndarray:
    if isinstance(mic_signals, np.ndarray):
        signals = mic_signals
    else:
        lengths = {len(s) for s in mic_signals}
        if len(lengths) > 1:
            raise ShapeError(f"microphone signals have different lengths: {sorted(lengths)}")
        signals = np.asarray(mic_signals)
    if signals.ndim != 2:
        raise ShapeError(f"expected (mics, samples) array, got shape {signals.shape}")
    return np.asarray(signals, dtype=float)


def analysis_matrix(geom: ArrayGeometry, max_mode: int) -> np.ndarray:
    """(2M+1, Q) matrix with entries C_m(alpha_q) / Q, rows ordered m = -M..M."""
    alphas = geom.mic_azimuths
    return np.stack(
        [circular_harmonic(m, alphas) for m in range(-max_mode, max_mode + 1)]
    ) / geom.mic_count


def ch_analyze(
    mic_signals: SignalInput,
    geom: ArrayGeometry,
    sample_rate: float,
    max_mode: Optional[int] = None,
) -> RingSpectra:
    """S_m(t) = (1/Q) sum_q s_q(t) C_m(alpha_q) for m = -M..M."""
    if max_mode is None:
        max_mode = geom.max_mode
    if geom.mic_count < 2 * max_mode + 1:
        raise GeometryError(
            f"{geom.mic_count} microphones resolve modes up to {geom.max_mode}, "
            f"requested {max_mode}"
        )
    signals = _as_matrix(mic_signals)
    if signals.shape[0] != geom.mic_count:
        raise ShapeError(f"{signals.shape[0]} signals for a {geom.mic_count}-microphone ring")
    modes = analysis_matrix(geom, max_mode) @ signals
    return RingSpectra(modes=modes, max_mode=max_mode, sample_rate=sample_rate)


def ch_synthesize(coefficients: np.ndarray, geom: ArrayGeometry) -> np.ndarray:
    """Ring pressure sum_m c_m C_m(alpha_q) from coefficients ordered m = -M..M."""
    coefficients = np.asarray(coefficients, dtype=float)
    max_mode = (coefficients.shape[0] - 1) // 2
    basis = np.stack(
        [circular_harmonic(m, geom.mic_azimuths) for m in range(-max_mode, max_mode + 1)], axis=1
    )
    return basis @ coefficients


def equalize(
    ring: RingSpectra, bank: EqualizationFilterBank, compensate_delay: bool = False
) -> RingSpectra:
    """Convolve mode m with the |m| equalizer.

    Output is the full convolution (input + fir_length - 1 samples, delayed by
    the modeling delay) or, with ``compensate_delay``, the input-length
    window starting at the modeling delay.
    """
    if bank.max_order < ring.max_mode:
        raise MismatchError(
            f"filter bank of order {bank.max_order} cannot equalize mode {ring.max_mode}"
        )
    if not math.isclose(bank.config.sample_rate, ring.sample_rate):
        raise MismatchError(
            f"sample rate {ring.sample_rate} Hz does not match bank {bank.config.sample_rate} Hz"
        )

    def run(m: int) -> np.ndarray:
        return overlap_save(ring.mode(m)[np.newaxis, :], bank.fir(m))[0]

    rows = np.stack(ordered_map(run, range(-ring.max_mode, ring.max_mode + 1)))
    latency = ring.latency_samples + bank.modeling_delay
    if compensate_delay:
        rows = compensate(rows, bank.modeling_delay, ring.length)
        latency = ring.latency_samples
    return RingSpectra(
        modes=np.ascontiguousarray(rows),
        max_mode=ring.max_mode,
        sample_rate=ring.sample_rate,
        latency_samples=latency,
    )


def expand(ring_eq: RingSpectra, table: EquatorFactorTable, order: int) -> AmbisonicSignalSet:
    """Channel ACN(n, m) = mode m times N_{n,m}(pi/2); odd n+|m| channels stay silent."""
    if order > ring_eq.max_mode:
        raise IndexRangeError(f"order {order} exceeds the {ring_eq.max_mode} available modes")
    if order > table.max_order:
        raise IndexRangeError(f"equator table of order {table.max_order} is too small for {order}")
    channels = np.zeros((channel_count(order), ring_eq.length))
    for n in range(order + 1):
        for m in range(-n, n + 1):
            if (n + abs(m)) % 2:
                continue
            channels[acn(n, m)] = ring_eq.mode(m) * table.value(n, m)
    return AmbisonicSignalSet(
        order=order,
        channels=channels,
        sample_rate=ring_eq.sample_rate,
        latency_samples=ring_eq.latency_samples,
    )


def encode(
    mic_signals: SignalInput,
    geom: ArrayGeometry,
    bank: EqualizationFilterBank,
    order: int,
    sample_rate: Optional[float] = None,
    compensate_delay: bool = False,
) -> AmbisonicSignalSet:
    """Microphone signals to ambisonic signals: ch_analyze, equalize, expand."""
    if order > geom.max_mode:
        raise GeometryError(
            f"order {order} needs at least {2 * order + 1} microphones, ring has {geom.mic_count}"
        )
    if order > bank.max_order:
        raise MismatchError(f"filter bank of order {bank.max_order} cannot encode order {order}")
    if not math.isclose(bank.config.radius, geom.radius) or not math.isclose(
        bank.config.speed_of_sound, geom.speed_of_sound
    ):
        raise MismatchError(
            f"filter bank designed for R={bank.config.radius} m, c={bank.config.speed_of_sound} m/s; "
            f"geometry has R={geom.radius} m, c={geom.speed_of_sound} m/s"
        )
    if sample_rate is None:
        sample_rate = bank.config.sample_rate

    ring = ch_analyze(mic_signals, geom, max_mode=order, sample_rate=sample_rate)
    ring_eq = equalize(ring, bank, compensate_delay=compensate_delay)
    ambi = expand(ring_eq, equator_table(order), order)
    logger.info(
        "encoded %d mics into order-%d ambisonics (%d channels, %d samples, latency %d)",
        geom.mic_count, order, ambi.channels.shape[0], ambi.length, ambi.latency_samples,
    )
    return ambi
