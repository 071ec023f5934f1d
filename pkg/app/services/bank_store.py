"""Filter-bank files (``.emafb``): container header + little-endian float64 taps, mode-major."""

import logging
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from app.core.dsp import bin_frequencies, fir_response, hermitian_response
from app.core.errors import ContainerFormatError
from app.core.radial import EqualizationFilterBank
from app.schemas.containers import FilterBankHeader
from app.services.containers import read_container, write_container

logger = logging.getLogger(__name__)

MAGIC = b"EMAFB\x00\x00\x01"


def save_bank(path: str | Path, bank: EqualizationFilterBank) -> None:
    modes = list(range(bank.max_order + 1))
    header = FilterBankHeader(
        config=bank.config,
        modeling_delay=bank.modeling_delay,
        fir_length=bank.config.fir_length,
        modes=modes,
        offsets=[m * bank.config.fir_length for m in modes],
        valid_band_hz=[bank.valid_band(m) for m in modes],
    )
    write_container(path, MAGIC, header, np.ascontiguousarray(bank.firs, dtype="<f8").tobytes())
    logger.info("wrote filter bank (%d modes) to %s", len(modes), path)


def load_bank(path: str | Path) -> EqualizationFilterBank:
    raw_header, payload = read_container(path, MAGIC)
    try:
        header = FilterBankHeader.model_validate(raw_header)
    except ValidationError as e:
        raise ContainerFormatError(f"{path}: bad filter-bank header ({e.error_count()} errors)") from e

    expected = len(header.modes) * header.fir_length * 8
    if len(payload) != expected:
        raise ContainerFormatError(f"{path}: payload has {len(payload)} bytes, expected {expected}")
    taps = np.frombuffer(payload, dtype="<f8").astype(float)
    firs = np.stack([taps[o : o + header.fir_length] for o in header.offsets])

    responses = hermitian_response(fir_response(firs, header.modeling_delay), header.fir_length)
    freqs = bin_frequencies(header.fir_length, header.config.sample_rate)
    active = np.ones(responses.shape, dtype=bool)
    for m, band in enumerate(header.valid_band_hz):
        if band is not None:
            active[m] = ~((freqs >= band[0]) & (freqs <= band[1]))
    return EqualizationFilterBank(
        config=header.config,
        responses=responses,
        firs=firs,
        modeling_delay=header.modeling_delay,
        regularization_active=active,
    )
