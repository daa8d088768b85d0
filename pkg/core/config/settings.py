# config/settings.py
from functools import lru_cache
from typing import Optional

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    ENV: str = "development"
    LOG_LEVEL: str = "WARNING"

    # Ingestion
    TIME_FORMAT: str = "ISO8601"

    # Event grouping defaults (overridden by --slack-min / --min-outages)
    SLACK_MIN: int = 0
    MIN_OUTAGES: int = 1

    # Metrics
    D95_FRACTION: float = 0.95
    CUSTOMERS_SERVED: Optional[int] = None

    # Reports
    SIG_DIGITS: int = 6
    OUTPUT_DIR: Optional[str] = None

    # Synthetic storms
    SYNTH_SEED: int = 0

    @property
    def is_production(self) -> bool:
        return self.ENV == "production"

    model_config = SettingsConfigDict(env_file=".env", env_prefix="GRIDREPAIR_", extra="ignore")


@lru_cache()
def get_settings() -> Settings:
    return Settings()
