"""
Centralized Configuration - Process-wide settings from environment variables.

Usage:
    from config import settings

    print(settings.REFERENCE_SAMPLES)
    print(settings.BLOWUP_THRESHOLD)

Per-experiment parameters (p, TOL1, time step, ...) live in ExperimentConfig
(tools/structured_outputs.py); this module only holds defaults that apply to
every run.
"""

from functools import lru_cache

from dotenv import load_dotenv
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

load_dotenv()


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore",
    )

    # Execution
    AMR_WORKERS: int = Field(
        default=1,
        description="Worker threads used to propagate element batches"
    )
    OUTPUT_DIR: str = Field(
        default="output",
        description="Default directory for run artifacts"
    )

    # Reference machinery
    REFERENCE_SAMPLES: int = Field(
        default=2 ** 16,
        description="Sample count for generated Sobol/MC references"
    )

    # Numerical guards
    BLOWUP_THRESHOLD: float = Field(
        default=1e10,
        description="States with |u| above this abort the run"
    )
    MAX_DEPTH: int = Field(
        default=20,
        description="Maximum per-dimension split depth of an element"
    )
    MAX_ELEMENTS: int = Field(
        default=100_000,
        description="Refinement stops creating elements beyond this count"
    )
    CFL_NUMBER: float = Field(
        default=0.5,
        description="Physical-space splits never create elements narrower than the CFL width"
    )

    # Discretization defaults
    KS_MODES: int = Field(
        default=64,
        description="Fourier collocation points for Kuramoto-Sivashinsky"
    )
    OVER_INTEGRATION: float = Field(
        default=1.0,
        description="Quadrature points per dimension = ceil(factor * (p + 1))"
    )

    # Output
    FLOAT_FORMAT: str = Field(
        default="%.17g",
        description="printf-style format for every float written to CSV"
    )
    LOG_LEVEL: str = Field(
        default="INFO",
        description="Root log level for the CLI"
    )


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()


# Convenience export
settings = get_settings()


def validate_settings(current: Settings | None = None) -> list[str]:
    """Return a list of configuration problems (empty when everything is fine)."""
    current = current or settings
    errors = []

    if current.AMR_WORKERS < 1:
        errors.append("AMR_WORKERS must be >= 1")

    if current.KS_MODES < 8 or current.KS_MODES & (current.KS_MODES - 1):
        errors.append("KS_MODES must be a power of two >= 8")

    if current.REFERENCE_SAMPLES < 1:
        errors.append("REFERENCE_SAMPLES must be >= 1")

    if current.OVER_INTEGRATION < 1.0:
        errors.append("OVER_INTEGRATION must be >= 1.0")

    if current.MAX_DEPTH < 1 or current.MAX_ELEMENTS < 1:
        errors.append("MAX_DEPTH and MAX_ELEMENTS must be positive")

    return errors


if __name__ == "__main__":
    print("Configuration Test")
    print("=" * 40)
    for name in Settings.model_fields:
        print(f"{name}: {getattr(settings, name)}")
    problems = validate_settings()
    if problems:
        print("⚠️  Configuration warnings:")
        for problem in problems:
            print(f"   - {problem}")
    else:
        print("✅ Configuration: All settings valid")
