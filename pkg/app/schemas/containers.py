from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

from app.schemas.radial import RadialConfig

FILTER_BANK_FORMAT = "emafb/1"
HRTF_GRID_FORMAT = "hrtfgrid/1"


class FilterBankHeader(BaseModel):
    """JSON header of a serialized equalization filter bank."""

    format: Literal["emafb/1"] = FILTER_BANK_FORMAT
    config: RadialConfig
    modeling_delay: int
    fir_length: int
    modes: list[int]
    offsets: list[int] = Field(..., description="First tap index of each mode in the payload")
    valid_band_hz: list[Optional[tuple[float, float]]]
    dtype: Literal["<f8"] = "<f8"

    @model_validator(mode="after")
    def check_layout(self) -> "FilterBankHeader":
        if self.fir_length != self.config.fir_length:
            raise ValueError(f"fir_length {self.fir_length} differs from config {self.config.fir_length}")
        if self.modeling_delay != self.config.modeling_delay:
            raise ValueError(
                f"modeling_delay {self.modeling_delay} differs from config {self.config.modeling_delay}"
            )
        if self.modes != list(range(self.config.max_order + 1)):
            raise ValueError(f"modes must be 0..{self.config.max_order}, got {self.modes}")
        if not len(self.offsets) == len(self.valid_band_hz) == len(self.modes):
            raise ValueError("offsets and valid_band_hz need one entry per mode")
        # one contiguous block of taps per mode
        if self.offsets != [m * self.fir_length for m in self.modes]:
            raise ValueError(f"offsets {self.offsets} do not tile the payload")
        return self


class HrtfGridHeader(BaseModel):
    """JSON header of an HRTF grid file; payload is (directions, 2, ir_length) float32."""

    format: Literal["hrtfgrid/1"] = HRTF_GRID_FORMAT
    sample_rate: float = Field(..., gt=0)
    ir_length: int = Field(..., gt=0)
    directions: list[tuple[float, float]] = Field(
        ..., description="(colatitude, azimuth) pairs in radians"
    )
    dtype: Literal["<f4"] = "<f4"
