import math
from typing import Optional

from pydantic import BaseModel, Field, field_validator


class PlaneWaveSource(BaseModel):
    """Horizontal plane wave arriving from ``azimuth`` (radians)."""

    azimuth: float
    amplitude: float = 1.0
    signal: str = Field(default="impulse", description="impulse | noise | sine:<Hz>")

    @field_validator("amplitude")
    @classmethod
    def finite_nonzero(cls, v: float) -> float:
        if not math.isfinite(v) or v == 0:
            raise ValueError("amplitude must be finite and nonzero")
        return v

    @field_validator("signal")
    @classmethod
    def known_signal(cls, v: str) -> str:
        if v in ("impulse", "noise"):
            return v
        if v.startswith("sine:"):
            try:
                frequency = float(v.split(":", 1)[1])
            except ValueError as e:
                raise ValueError(f"bad sine frequency in {v!r}") from e
            if frequency <= 0:
                raise ValueError("sine frequency must be positive")
            return v
        raise ValueError(f"unknown signal {v!r}; expected impulse, noise or sine:<Hz>")


class TruthCoefficient(BaseModel):
    acn: int
    n: int
    m: int
    value: float


class TruthFile(BaseModel):
    azimuth_deg: float
    amplitude: float
    order: int
    coefficients: list[TruthCoefficient]


class TruthRequest(BaseModel):
    azimuth_deg: float = Field(..., description="Incidence azimuth in degrees")
    order: int = Field(..., ge=0, le=64)
    amplitude: float = 1.0


class EquatorTableResponse(BaseModel):
    max_order: int
    values: list[float]
    zero_channels: list[int]
    note: Optional[str] = None
