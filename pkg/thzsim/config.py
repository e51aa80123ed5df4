"""
Process configuration using Pydantic Settings.

Settings come from environment variables (prefix ``THZSIM_``) or a local
``.env`` file. Experiment parameters live in the JSON config document
instead, see ``thzsim.models.system_config``.
"""

import os
from functools import lru_cache

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Runtime settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="THZSIM_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
    )

    # Monte Carlo execution
    workers: int = 0                # 0 → os.cpu_count()
    block_size: int = 4096          # trials per substream block; part of the reproducibility contract
    escalation_trials: int = 1_000_000

    # Time-domain ICI oracle
    empirical_samples: int = 2**18
    empirical_averages: int = 8

    # ICI coefficient cache
    ici_cache_size: int = 256

    # Output
    output_dir: str = "results"

    # App
    log_level: str = "INFO"

    @property
    def worker_count(self) -> int:
        """Resolve the effective worker count."""
        if self.workers and self.workers > 0:
            return self.workers
        return os.cpu_count() or 1


@lru_cache()
def get_settings() -> Settings:
    """
    Get cached settings instance.
    Uses lru_cache to ensure settings are only loaded once.
    """
    return Settings()
