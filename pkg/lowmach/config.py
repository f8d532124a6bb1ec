"""Process-level settings for lowmach.

Simulation parameters live in :mod:`lowmach.schemas.config`; this module only
holds the knobs that describe *where* and *how loudly* a run happens.
Values can be overridden by environment variables prefixed with ``LOWMACH_``.
"""

from functools import lru_cache

from dotenv import load_dotenv
from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from .exceptions import ConfigError

load_dotenv()


class Settings(BaseSettings):
    """Runtime settings shared by the CLI, the sweep driver and the tests."""

    log_level: str = Field(default="INFO", description="Logging level")
    log_dir: str = Field(default="logs", description="Directory for log files")
    json_logs: bool = Field(default=True, description="Write JSON-formatted file logs")
    output_dir: str = Field(default="output", description="Default directory for run artifacts")
    metrics_dir: str = Field(default="logs/metrics", description="Directory for run metrics")
    threads: int = Field(default=1, description="Worker threads for independent runs")

    model_config = SettingsConfigDict(
        env_prefix="LOWMACH_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate log level."""
        valid_levels = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}
        if v.upper() not in valid_levels:
            raise ConfigError(f"Invalid log level. Must be one of: {valid_levels}")
        return v.upper()

    @field_validator("threads")
    @classmethod
    def validate_threads(cls, v: int) -> int:
        if v < 1:
            raise ConfigError("threads must be at least 1")
        return v


@lru_cache
def get_settings() -> Settings:
    """Create cached instance of settings.

    Returns:
        Settings: runtime settings
    """
    return Settings()
