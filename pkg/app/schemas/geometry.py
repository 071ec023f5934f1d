import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from app.core.config import settings


class ArrayGeometry(BaseModel):
    """Uniform ring of microphones on the equator of a rigid sphere.

    Microphone q sits at azimuth 2*pi*q/Q; channel q of a capture is mic q.
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    radius: float = Field(..., gt=0, alias="radius_m", description="Sphere radius in meters")
    mic_count: int = Field(..., ge=3)
    speed_of_sound: float = Field(default_factory=lambda: settings.SPEED_OF_SOUND, gt=0)

    @property
    def mic_azimuths(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.mic_count) / self.mic_count

    @property
    def max_mode(self) -> int:
        """Highest circular-harmonic mode M = floor((Q-1)/2) the ring resolves."""
        return (self.mic_count - 1) // 2

    def rotated(self, steps: int = 1) -> np.ndarray:
        """Channel permutation that rotates the ring by ``steps`` positions."""
        return np.roll(np.arange(self.mic_count), steps)
