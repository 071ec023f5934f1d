import os

from dotenv import load_dotenv
from pydantic import ConfigDict, ValidationInfo, field_validator
from pydantic_settings import BaseSettings

load_dotenv()

class Settings(BaseSettings):
    PROJECT_NAME: str = "ema-ambisonics"
    VERSION: str = "0.1.0"
    API_V1_STR: str = "/api/v1"

    # Environment
    ENVIRONMENT: str = "development"
    DEBUG: bool = False

    # Logging
    LOG_LEVEL: str = "INFO"

    # Parallelism (0 = one worker per CPU)
    EMA_NUM_THREADS: int = 0

    # Acoustics
    SPEED_OF_SOUND: float = 343.0
    DEFAULT_RADIUS_M: float = 0.0875
    DEFAULT_SAMPLE_RATE: int = 48000

    # Radial filters
    DEFAULT_FIR_LENGTH: int = 2048
    DEFAULT_MAX_GAIN_DB: float = 40.0
    TRUNCATION_MARGIN: int = 40
    PASSBAND_ATTENUATION_DB: float = 0.1

    # Simulation
    SIMULATION_MARGIN: int = 30
    NOISE_SEED: int = 0

    # HRTF transform
    CONDITION_LIMIT: float = 1e6

    @field_validator("EMA_NUM_THREADS", mode="before")
    @classmethod
    def non_negative_threads(cls, v, info: ValidationInfo):
        if v in (None, ""):
            return 0
        if int(v) < 0:
            raise ValueError(f"{info.field_name} must be >= 0, got {v}")
        return int(v)

    model_config = ConfigDict(
        case_sensitive=True,
        env_file=".env",
        extra="ignore",
    )

settings = Settings()


def worker_count() -> int:
    """Number of worker threads for per-mode work."""
    if settings.EMA_NUM_THREADS > 0:
        return settings.EMA_NUM_THREADS
    return os.cpu_count() or 1
