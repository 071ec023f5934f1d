import math
from typing import Optional

from pydantic import BaseModel, Field, model_validator

from app.core.config import settings


class PipelineParams(BaseModel):
    """Inputs of the end-to-end simulate, design, encode, render run."""

    azimuth_deg: float = 0.0
    radius: float = Field(default_factory=lambda: settings.DEFAULT_RADIUS_M, gt=0)
    mic_count: int = Field(default=16, ge=3)
    order: int = Field(default=4, ge=0)
    sample_rate: int = Field(default_factory=lambda: settings.DEFAULT_SAMPLE_RATE, gt=0)
    length: int = Field(default=8192, gt=0)
    fir_length: int = Field(default_factory=lambda: settings.DEFAULT_FIR_LENGTH, gt=0)
    max_gain_db: float = Field(default_factory=lambda: settings.DEFAULT_MAX_GAIN_DB, gt=0)
    speed_of_sound: float = Field(default_factory=lambda: settings.SPEED_OF_SOUND, gt=0)
    amplitude: float = 1.0
    signal: str = "impulse"

    @model_validator(mode="after")
    def measurable(self) -> "PipelineParams":
        if self.length < self.fir_length or self.length % self.fir_length:
            raise ValueError(
                f"simulation length {self.length} must be a multiple of fir_length {self.fir_length}"
            )
        if not math.isfinite(self.amplitude) or self.amplitude == 0:
            raise ValueError("amplitude must be finite and nonzero")
        return self


class ChannelReport(BaseModel):
    acn: int
    n: int
    m: int
    truth: float
    silent: bool = Field(default=False, description="Truth coefficient is zero")
    band_hz: Optional[tuple[float, float]] = None
    mean_magnitude_db: Optional[float] = None
    max_magnitude_error_db: Optional[float] = None
    max_phase_error_deg: Optional[float] = None
    level_below_peak_db: Optional[float] = Field(
        default=None, description="None when the channel is exactly zero in band"
    )
    passed: bool


class PipelineReport(BaseModel):
    azimuth_deg: float
    radius: float
    mic_count: int
    order: int
    sample_rate: float
    fir_length: int
    simulation_truncation: int
    evaluated_band_hz: tuple[float, float]
    valid_band_hz: dict[int, Optional[tuple[float, float]]]
    ambisonic_latency_samples: int
    binaural_latency_samples: int
    channels: list[ChannelReport]
    passed: bool
