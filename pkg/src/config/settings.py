"""Environment-driven defaults. CLI flags override these per job."""

from __future__ import annotations

from functools import lru_cache
from typing import Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="CUTTAIL_", extra="ignore")

    eps: float = Field(default=1e-7, gt=0)
    time_tol: float = Field(default=1e-4, gt=0)
    value_tol: float = Field(default=1e-6, gt=0)
    max_iter: int = Field(default=500, ge=1)
    samples: int = Field(default=4000, ge=16)
    seed: int = 0
    budget: int = Field(default=200, ge=1)
    format: Literal["json-lines", "csv"] = "json-lines"
    workers: int = Field(default=1, ge=1)


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings()
