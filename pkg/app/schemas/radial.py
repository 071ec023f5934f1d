from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.core.config import settings
from app.core.sphmath import MAX_ORDER

MIN_NONZERO_TERMS = 8


class RadialConfig(BaseModel):
    """Parameters of the per-mode equalization filters."""

    model_config = ConfigDict(frozen=True)

    radius: float = Field(..., gt=0, description="Sphere radius in meters")
    speed_of_sound: float = Field(default_factory=lambda: settings.SPEED_OF_SOUND, gt=0)
    sample_rate: float = Field(default_factory=lambda: settings.DEFAULT_SAMPLE_RATE, gt=0)
    fir_length: int = Field(default_factory=lambda: settings.DEFAULT_FIR_LENGTH, gt=0)
    max_order: int = Field(..., ge=0)
    truncation_order: Optional[int] = None
    max_gain_db: float = Field(default_factory=lambda: settings.DEFAULT_MAX_GAIN_DB, gt=0)

    @model_validator(mode="before")
    @classmethod
    def default_truncation(cls, data):
        if isinstance(data, dict) and data.get("truncation_order") is None and "max_order" in data:
            data = {
                **data,
                "truncation_order": min(int(data["max_order"]) + settings.TRUNCATION_MARGIN, MAX_ORDER),
            }
        return data

    @model_validator(mode="after")
    def check_invariants(self) -> "RadialConfig":
        if self.fir_length & (self.fir_length - 1):
            raise ValueError(f"fir_length must be a power of two, got {self.fir_length}")
        if self.fir_length < 2 * (self.max_order + 1):
            raise ValueError(
                f"fir_length {self.fir_length} too short for order {self.max_order}"
            )
        if self.truncation_order < self.max_order:
            raise ValueError("truncation_order must be >= max_order")
        if self.truncation_order > MAX_ORDER:
            raise ValueError(f"truncation_order must be <= {MAX_ORDER}")
        # worst case is |m| = max_order
        terms = (self.truncation_order - self.max_order) // 2 + 1
        if terms < MIN_NONZERO_TERMS:
            raise ValueError(
                f"truncation_order {self.truncation_order} leaves only {terms} "
                f"nonzero terms for |m| = {self.max_order}; need {MIN_NONZERO_TERMS}"
            )
        return self

    @property
    def bin_count(self) -> int:
        return self.fir_length // 2 + 1

    @property
    def modeling_delay(self) -> int:
        return self.fir_length // 2


class ModeSummary(BaseModel):
    mode: int
    peak_gain_db: float
    valid_band_hz: Optional[tuple[float, float]] = None


class FilterBankSummary(BaseModel):
    config: RadialConfig
    modeling_delay: int
    modes: list[ModeSummary]
