"""Configuration settings for the SDS engine."""

from pathlib import Path
from pydantic_settings import BaseSettings

_ROOT = Path(__file__).resolve().parent


class Settings(BaseSettings):
    """Engine settings."""

    # Exhaustive enumeration limits
    automorphism_bound: int = 128
    exhaustive_type_check_order: int = 64
    type_check_samples: int = 16

    # Reproducibility
    sample_seed: int = 1729

    # Search
    search_budget: int = 5_000_000
    search_workers: int = 1

    # Files
    catalog_dir: Path = _ROOT / "data" / "catalog"
    output_dir: Path = Path("out")

    log_level: str = "INFO"

    class Config:
        env_file = ".env"
        env_prefix = "SDS_"
        case_sensitive = False


# Global settings instance
settings = Settings()
