"""
Settings and configuration management for the kappa-psi calculator.
Uses Pydantic Settings for environment variable management.
"""

from typing import Optional, Union

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from ..models.schemas import ALL_ENGINES, Engine, OutputFormat, VerifyBounds


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="KAPPA_PSI_",
        case_sensitive=False,
    )

    # Application Configuration
    app_name: str = "kappa-psi"
    app_version: str = "1.0.0"
    log_level: str = "INFO"
    log_file: Optional[str] = None

    # Cache Configuration
    cache_path: Optional[str] = None

    # Engine / Output Configuration
    engine: Union[Engine, str] = ALL_ENGINES
    default_engine: Engine = Engine.KMZ_DVV
    output_format: OutputFormat = OutputFormat.PLAIN

    # Constants Configuration
    alpha_max_weight: int = 15

    # Verification Configuration
    verify_max_t: int = 8
    verify_max_s: int = 5
    verify_max_degree: int = 8
    verify_g_max: int = 3
    verify_commutator_degree: int = 3
    verify_iz_g_max: int = 6
    proposition_trials: int = 200
    proposition_seed: int = 20240607
    engines_max_dimension: int = 7
    engines_max_kappa_weight: int = 4

    @field_validator("engine", mode="before")
    @classmethod
    def validate_engine(cls, v):
        if isinstance(v, Engine):
            return v
        name = str(v).strip().lower()
        if name == ALL_ENGINES:
            return ALL_ENGINES
        return Engine(name)

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v):
        level = v.upper()
        if level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"unknown log level {v}")
        return level

    @property
    def bounds(self) -> VerifyBounds:
        """Truncation bounds for the generating-function checks."""
        return VerifyBounds(
            max_t=self.verify_max_t,
            max_s=self.verify_max_s,
            max_degree=self.verify_max_degree,
            commutator_degree=self.verify_commutator_degree,
        )

    @property
    def selected_engines(self) -> list:
        """Engines a correlator query runs through."""
        if self.engine == ALL_ENGINES:
            return list(Engine)
        return [self.engine]


# Global settings instance
settings = Settings()
