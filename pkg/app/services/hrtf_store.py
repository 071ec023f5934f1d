"""HRTF grid files: container header + float32 impulse responses (direction, ear, sample)."""

import logging
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from app.core.errors import ContainerFormatError
from app.core.renderer import HrtfGrid
from app.schemas.containers import HrtfGridHeader
from app.services.containers import read_container, write_container

logger = logging.getLogger(__name__)

MAGIC = b"HRTFGRD1"


def save_grid(path: str | Path, grid: HrtfGrid) -> None:
    header = HrtfGridHeader(
        sample_rate=grid.sample_rate,
        ir_length=grid.ir_length,
        directions=[(float(b), float(a)) for b, a in grid.directions],
    )
    write_container(path, MAGIC, header, np.ascontiguousarray(grid.irs, dtype="<f4").tobytes())
    logger.info("wrote HRTF grid with %d directions to %s", grid.directions.shape[0], path)


def load_grid(path: str | Path) -> HrtfGrid:
    raw_header, payload = read_container(path, MAGIC)
    try:
        header = HrtfGridHeader.model_validate(raw_header)
    except ValidationError as e:
        raise ContainerFormatError(f"{path}: bad HRTF grid header ({e.error_count()} errors)") from e

    shape = (len(header.directions), 2, header.ir_length)
    expected = int(np.prod(shape)) * 4
    if len(payload) != expected:
        raise ContainerFormatError(f"{path}: payload has {len(payload)} bytes, expected {expected}")
    irs = np.frombuffer(payload, dtype="<f4").reshape(shape).astype(float)
    return HrtfGrid(
        directions=np.array(header.directions, dtype=float),
        irs=irs,
        sample_rate=header.sample_rate,
    )
