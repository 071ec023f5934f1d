"""FIR synthesis and block convolution shared by the radial and HRTF filters.

Transforms use numpy's convention: negative exponent forward, positive inverse.
"""

import logging
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

import numpy as np

from app.core.config import worker_count
from app.core.errors import ShapeError

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Apply ``fn`` to every item on the worker pool; results keep input order."""
    items = list(items)
    workers = min(worker_count(), len(items)) or 1
    if workers == 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def bin_frequencies(fft_length: int, sample_rate: float) -> np.ndarray:
    return np.fft.rfftfreq(fft_length, d=1.0 / sample_rate)


def hermitian_response(response: np.ndarray, fft_length: int) -> np.ndarray:
    """Project a one-sided response onto one that a real signal can have.

    The DC bin and, for even lengths, the Nyquist bin are made real.
    """
    response = np.array(response, dtype=complex, copy=True)
    if response.shape[-1] != fft_length // 2 + 1:
        raise ShapeError(
            f"response has {response.shape[-1]} bins, expected {fft_length // 2 + 1}"
        )
    response[..., 0] = response[..., 0].real
    if fft_length % 2 == 0:
        response[..., -1] = response[..., -1].real
    return response


def realize_fir(response: np.ndarray, fft_length: int, delay: int | None = None) -> np.ndarray:
    """Real FIR whose transform equals ``response`` times exp(-i w delay).

    ``response`` must already be Hermitian-consistent (see hermitian_response).
    The delay defaults to half the length.
    """
    if delay is None:
        delay = fft_length // 2
    taps = np.fft.irfft(response, n=fft_length, axis=-1)
    return np.roll(taps, delay, axis=-1)


def fir_response(taps: np.ndarray, delay: int) -> np.ndarray:
    """Inverse of realize_fir: transform of ``taps`` with the delay removed."""
    fft_length = taps.shape[-1]
    k = np.arange(fft_length // 2 + 1)
    return np.fft.rfft(taps, axis=-1) * np.exp(2j * np.pi * k * delay / fft_length)


def overlap_save(signals: np.ndarray, taps: np.ndarray, block_size: int | None = None) -> np.ndarray:
    """Full linear convolution of each row of ``signals`` with its row of ``taps``.

    signals: (channels, samples); taps: (channels, fir_length) or (fir_length,).
    Returns (channels, samples + fir_length - 1).
    """
    signals = np.atleast_2d(np.asarray(signals, dtype=float))
    taps = np.asarray(taps, dtype=float)
    if taps.ndim == 1:
        taps = np.broadcast_to(taps, (signals.shape[0], taps.shape[0]))
    if taps.shape[0] != signals.shape[0]:
        raise ShapeError(f"{signals.shape[0]} signals but {taps.shape[0]} filters")

    n_channels, n_samples = signals.shape
    fir_length = taps.shape[1]
    out_length = n_samples + fir_length - 1
    if block_size is None:
        block_size = fir_length
    if block_size < fir_length:
        raise ShapeError(f"block size {block_size} shorter than filter {fir_length}")
    fft_length = 1 << int(np.ceil(np.log2(block_size + fir_length - 1)))
    hop = fft_length - fir_length + 1

    spectra = np.fft.rfft(taps, n=fft_length, axis=1)
    n_blocks = -(-out_length // hop)
    padded = np.zeros((n_channels, fir_length - 1 + n_blocks * hop + fir_length))
    padded[:, fir_length - 1 : fir_length - 1 + n_samples] = signals

    out = np.empty((n_channels, n_blocks * hop))
    for b in range(n_blocks):
        start = b * hop
        frame = padded[:, start : start + fft_length]
        block = np.fft.irfft(np.fft.rfft(frame, axis=1) * spectra, n=fft_length, axis=1)
        out[:, start : start + hop] = block[:, fir_length - 1 :]
    logger.debug(
        "overlap-save: %d channels, %d blocks of %d (fft %d)", n_channels, n_blocks, hop, fft_length
    )
    return out[:, :out_length]


def compensate(signals: np.ndarray, delay: int, length: int) -> np.ndarray:
    """Drop ``delay`` leading samples and keep ``length`` samples."""
    return signals[..., delay : delay + length]
