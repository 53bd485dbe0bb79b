from pathlib import Path
from typing import Optional

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    ENV: str = "development"
    PROJECT_NAME: str = "Predator-prey market simulator"

    # default output directory of the harness, overridden by --out
    OUTPUT_DIR: Path = Path("runs")
    LOG_LEVEL: str = "INFO"
    LOG_ROTATION: str = "10 MB"
    LOG_FILE_NAME: str = "run.log"

    # worker processes for multi-seed runs, None means one per cpu
    MAX_WORKERS: Optional[int] = None

    # trading calendar
    DAY_LENGTH_MIN: float = 480.0
    DAYS_PER_YEAR: int = 250

    # round-trips float64
    FLOAT_FORMAT: str = "%.17g"
    COLUMN_DELIMITER: str = "\t"

    RNG_ALGORITHM: str = "PCG64"
    # random numbers drawn per block in the event loop
    RANDOM_BLOCK_SIZE: int = 1 << 16
    # rows allocated per growth step of the event log
    EVENT_BUFFER_CHUNK: int = 1 << 20

    # minute-scale defaults of the solvers
    ODE_RTOL: float = 1e-9
    ODE_ATOL: float = 1e-12
    SDE_STEPS_PER_TAU0: int = 100
    SDE_BURN_IN_TAU0: float = 20.0
    QUAD_CUTOFF_TAU0: float = 1e3

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        env_nested_delimiter="__",
        extra="ignore",
    )


settings = Settings()
