"""WAV files with JSON sidecars.

Integer PCM is read as x / 2^(bits-1) (full-scale 16-bit maps to 32767/32768);
float files pass through unchanged. Writes are always 32-bit float with
only fmt, fact and data chunks, so equal samples give equal bytes.
"""

import json
import logging
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Union

import numpy as np
import soundfile as sf
from scipy.io import wavfile

from app.core.errors import (
    CorruptFileError,
    EmptyFileError,
    ShapeError,
    UnsupportedCodecError,
)
from app.schemas.audio import SidecarMetadata
from app.schemas.common import parse_model

logger = logging.getLogger(__name__)

SUPPORTED_SUBTYPES = ("PCM_16", "PCM_24", "FLOAT")
_CHUNK_HEADER = struct.Struct("<4sI")


@dataclass(frozen=True)
class MultichannelBuffer:
    """Planar samples ``(channels, frames)`` at ``sample_rate`` Hz."""

    samples: np.ndarray
    sample_rate: float

    def __post_init__(self):
        if self.samples.ndim != 2:
            raise ShapeError(f"buffer must be (channels, frames), got shape {self.samples.shape}")
        if not self.sample_rate > 0:
            raise ShapeError(f"sample rate must be positive, got {self.sample_rate}")

    @property
    def channel_count(self) -> int:
        return self.samples.shape[0]

    @property
    def frame_count(self) -> int:
        return self.samples.shape[1]


def sidecar_path(path: Union[str, Path]) -> Path:
    return Path(f"{path}.json")


def _check_data_chunk(path: Path) -> None:
    """The declared size of the RIFF data chunk must fit in the file."""
    size = path.stat().st_size
    with open(path, "rb") as fh:
        header = fh.read(12)
        if len(header) < 12 or header[:4] != b"RIFF" or header[8:] != b"WAVE":
            raise CorruptFileError(f"{path}: missing RIFF/WAVE header")
        offset = 12
        while True:
            raw = fh.read(_CHUNK_HEADER.size)
            if len(raw) < _CHUNK_HEADER.size:
                raise CorruptFileError(f"{path}: no data chunk")
            chunk_id, chunk_size = _CHUNK_HEADER.unpack(raw)
            offset += _CHUNK_HEADER.size
            if chunk_id == b"data":
                if offset + chunk_size > size:
                    raise CorruptFileError(
                        f"{path}: data chunk declares {chunk_size} bytes, "
                        f"file holds {size - offset}"
                    )
                return
            # chunks are word aligned
            offset += chunk_size + (chunk_size & 1)
            fh.seek(offset)


def read_wav(path: Union[str, Path]) -> MultichannelBuffer:
    path = Path(path)
    if path.stat().st_size == 0:
        raise EmptyFileError(f"{path}: file is empty")
    try:
        info = sf.info(str(path))
    except sf.LibsndfileError as e:
        raise CorruptFileError(f"{path}: {e}") from e
    if info.format != "WAV" or info.subtype not in SUPPORTED_SUBTYPES:
        raise UnsupportedCodecError(
            f"{path}: {info.format}/{info.subtype} is not 16/24-bit PCM or 32-bit float WAV"
        )
    if info.frames == 0:
        raise EmptyFileError(f"{path}: no audio frames")
    _check_data_chunk(path)
    try:
        data, sample_rate = sf.read(str(path), dtype="float64", always_2d=True)
    except sf.LibsndfileError as e:
        raise CorruptFileError(f"{path}: {e}") from e
    if data.shape[0] != info.frames:
        raise CorruptFileError(f"{path}: header announces {info.frames} frames, read {data.shape[0]}")
    logger.debug("read %s: %d channels, %d frames, %s", path, data.shape[1], data.shape[0], info.subtype)
    return MultichannelBuffer(samples=np.ascontiguousarray(data.T), sample_rate=float(sample_rate))


def write_wav(
    path: Union[str, Path],
    buffer: MultichannelBuffer,
    metadata: Union[SidecarMetadata, dict[str, Any]],
) -> SidecarMetadata:
    """Write a float32 WAV and its ``<path>.json`` sidecar; returns the validated sidecar."""
    if not isinstance(metadata, SidecarMetadata):
        metadata = parse_model(SidecarMetadata, metadata)
    if metadata.channel_count != buffer.channel_count:
        raise ShapeError(
            f"metadata declares {metadata.channel_count} channels, buffer has {buffer.channel_count}"
        )
    if metadata.sample_rate != buffer.sample_rate:
        raise ShapeError(
            f"metadata sample rate {metadata.sample_rate} differs from buffer {buffer.sample_rate}"
        )
    if buffer.sample_rate != int(buffer.sample_rate):
        raise ShapeError(f"WAV needs an integer sample rate, got {buffer.sample_rate}")

    path = Path(path)
    try:
        wavfile.write(
            str(path),
            int(buffer.sample_rate),
            np.ascontiguousarray(buffer.samples.T, dtype=np.float32),
        )
        sidecar_path(path).write_text(
            json.dumps(metadata.model_dump(mode="json", by_alias=True), indent=2, sort_keys=True) + "\n"
        )
    except OSError as e:
        raise OSError(f"cannot write {path}: {e}") from e
    logger.info("wrote %s (%d channels, %d frames)", path, buffer.channel_count, buffer.frame_count)
    return metadata


def read_sidecar(path: Union[str, Path]) -> SidecarMetadata:
    """Sidecar of the WAV at ``path`` (the ``.json`` suffix is added)."""
    text = sidecar_path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise CorruptFileError(f"{sidecar_path(path)}: {e}") from e
    return parse_model(SidecarMetadata, data)
