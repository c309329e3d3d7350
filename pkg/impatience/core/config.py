"""Application configuration loaded from environment variables."""
from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    output_dir: Path = Path("results")
    log_level: str = "INFO"
    seed: int = Field(default=42, ge=0, lt=2**64)
    workers: int = Field(default=1, ge=1)

    model_config = SettingsConfigDict(
        env_prefix="IMPATIENCE_", env_file=".env", case_sensitive=False, extra="ignore"
    )


settings = Settings()
