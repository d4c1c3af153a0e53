"""
Application settings.

Values come from CURVOSC_* environment variables or a .env file; list
settings accept either a JSON array or a comma-separated string.
"""

import json
from functools import lru_cache
from pathlib import Path
from typing import List, Union

from pydantic import field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    Environment-driven settings.

    Attributes:
        debug (bool): Debug mode (forces DEBUG logging)
        log_level (str): Logging level name
        log_format (str): logging.basicConfig format string
        output_dir (Path): Default directory for artifacts, created on construction
        float_format (str): printf-style float format of CSV exports
        max_workers (int): Thread pool size for sweeps and suites
        cache_ttl (float): Lifetime in seconds of cached eigensolves
        default_seed (int): Seed used when neither the CLI nor the config gives one
        suites (List[str]): Verification suites run by default
    """
    debug: bool = False
    log_level: str = "INFO"
    log_format: str = "%(asctime)s %(levelname)s %(name)s: %(message)s"
    output_dir: Path = Path("output")
    float_format: str = "%.17g"
    max_workers: int = 4
    cache_ttl: float = 3600.0
    default_seed: int = 7
    suites: Union[List[str], str] = ["all"]

    model_config = SettingsConfigDict(
        env_prefix="CURVOSC_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    @field_validator('suites', mode='before')
    @classmethod
    def parse_suites(cls, v):
        """Accept a list, a JSON array string or a comma-separated string."""
        if isinstance(v, str):
            text = v.strip()
            if text.startswith('['):
                return [str(item) for item in json.loads(text)]
            return [item.strip() for item in text.split(',') if item.strip()]
        return v

    @field_validator('log_level')
    @classmethod
    def validate_log_level(cls, v):
        """Validate the logging level name."""
        level = v.upper()
        if level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"Unsupported log level: {v}")
        return level

    @field_validator('max_workers')
    @classmethod
    def validate_max_workers(cls, v):
        """Validate the worker count."""
        if v < 1:
            raise ValueError(f"max_workers must be >= 1, got {v}")
        return v

    @model_validator(mode='after')
    def create_output_dir(self):
        """Create the output directory."""
        self.output_dir.mkdir(parents=True, exist_ok=True)
        return self

    @property
    def effective_log_level(self) -> str:
        return "DEBUG" if self.debug else self.log_level


@lru_cache()
def get_settings() -> Settings:
    """Return the process-wide settings."""
    return Settings()
