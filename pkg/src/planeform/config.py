from __future__ import annotations

from pydantic import Field, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # Numerical tolerance
    tolerance_relative: float = Field(default=1e-9, gt=0, lt=1)
    tolerance_absolute: float = Field(default=1e-12, gt=0)
    tolerance_angular: float = Field(default=1e-7, gt=0, lt=1e-2)

    # Simulation
    default_seed: int = Field(default=0, ge=0)
    max_cycles: int = Field(default=10, ge=1, le=10000)
    compute_workers: int = Field(default=1, ge=1, le=64)
    scale_min: float = Field(default=0.1, gt=0)
    scale_max: float = Field(default=10.0, gt=0)

    # Algorithm constants
    break_epsilon_ratio: float = Field(default=0.01, gt=0, lt=0.5)

    # Logging
    log_level: str = Field(default="INFO")
    log_format: str = Field(default="text")  # json or text

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v):
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        if v.upper() not in valid_levels:
            raise ValueError(f"Log level must be one of: {valid_levels}")
        return v.upper()

    @field_validator("log_format")
    @classmethod
    def validate_log_format(cls, v):
        valid_formats = ["json", "text"]
        if v.lower() not in valid_formats:
            raise ValueError(f"Log format must be one of: {valid_formats}")
        return v.lower()

    @model_validator(mode="after")
    def validate_scale_range(self):
        if self.scale_min > self.scale_max:
            raise ValueError("scale_min must not exceed scale_max")
        return self

    model_config = SettingsConfigDict(
        env_prefix="PLANEFORM_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )


SETTINGS = Settings()
