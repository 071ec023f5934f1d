from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

from app.core.config import settings
from app.schemas.geometry import ArrayGeometry


class SidecarMetadata(BaseModel):
    """Metadata written next to every WAV as ``<path>.json``."""

    kind: Literal["mics", "ambisonics", "binaural"]
    sample_rate: float = Field(..., gt=0)
    channel_count: int = Field(..., ge=1)
    order: Optional[int] = Field(default=None, ge=0)
    channel_ordering: Optional[Literal["ACN"]] = None
    normalization: Optional[Literal["N3D"]] = None
    geometry: Optional[ArrayGeometry] = None
    latency_samples: int = 0
    tool_version: str = Field(default_factory=lambda: settings.VERSION)

    @model_validator(mode="after")
    def ambisonic_tags(self) -> "SidecarMetadata":
        if self.kind != "ambisonics":
            return self
        if self.order is None:
            raise ValueError("ambisonic metadata requires an order")
        if self.channel_count != (self.order + 1) ** 2:
            raise ValueError(
                f"order {self.order} needs {(self.order + 1) ** 2} channels, "
                f"got {self.channel_count}"
            )
        if self.channel_ordering is None:
            self.channel_ordering = "ACN"
        if self.normalization is None:
            self.normalization = "N3D"
        return self
