"""Binary container: 8-byte magic, uint32 LE header length, JSON header, padding, payload.

The header is padded with spaces so the payload starts on an 8-byte boundary.
"""

import json
import struct
from pathlib import Path

from pydantic import BaseModel

from app.core.errors import ContainerFormatError

_LENGTH = struct.Struct("<I")


def write_container(path: str | Path, magic: bytes, header: BaseModel, payload: bytes) -> None:
    if len(magic) != 8:
        raise ValueError("container magic must be 8 bytes")
    text = json.dumps(header.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    encoded = text.encode("utf-8")
    used = len(magic) + _LENGTH.size + len(encoded)
    encoded += b" " * (-used % 8)
    try:
        with open(path, "wb") as fh:
            fh.write(magic)
            fh.write(_LENGTH.pack(len(encoded)))
            fh.write(encoded)
            fh.write(payload)
    except OSError as e:
        raise OSError(f"cannot write {path}: {e.strerror or e}") from e


def read_container(path: str | Path, magic: bytes) -> tuple[dict, bytes]:
    data = Path(path).read_bytes()
    if len(data) < len(magic) + _LENGTH.size or data[: len(magic)] != magic:
        raise ContainerFormatError(f"{path}: not a {magic.decode(errors='replace')} container")
    offset = len(magic)
    (length,) = _LENGTH.unpack_from(data, offset)
    offset += _LENGTH.size
    if offset + length > len(data):
        raise ContainerFormatError(f"{path}: header runs past the end of the file")
    try:
        header = json.loads(data[offset : offset + length].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ContainerFormatError(f"{path}: header is not valid JSON ({e})") from e
    return header, data[offset + length :]
