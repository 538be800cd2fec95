"""Validated job description built by the CLI."""

from __future__ import annotations

from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

Command = Literal["cut-tail", "extremal", "verify2d", "simulate", "sweep"]
OutputFormat = Literal["json-lines", "csv"]

_SINGLE_INPUT: frozenset[str] = frozenset({"cut-tail", "extremal", "verify2d"})


class JobConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    command: Command
    matrix: tuple[Path, ...] = ()
    spectrum: str | None = None
    eps: float = Field(default=1e-7, gt=0)
    time_tol: float = Field(default=1e-4, gt=0)
    value_tol: float = Field(default=1e-6, gt=0)
    max_iter: int = Field(default=500, ge=1)
    samples: int = Field(default=4000, ge=16)
    horizon: float | None = Field(default=None, gt=0)
    at: float | None = Field(default=None, gt=0)
    seed: int = 0
    budget: int = Field(default=200, ge=1)
    seeds: int = Field(default=1, ge=1)
    dwell_min: float = Field(default=0.1, gt=0)
    format: OutputFormat = "json-lines"
    plot: Path | None = None
    timestamps: bool = True
    workers: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _check_inputs(self) -> JobConfig:
        if self.command in _SINGLE_INPUT:
            sources = len(self.matrix) + (self.spectrum is not None)
            if sources != 1:
                raise ValueError(
                    f"{self.command} needs exactly one of --matrix FILE or --spectrum STR"
                )
        elif self.command == "sweep":
            if not self.matrix or self.spectrum is not None:
                raise ValueError("sweep needs one or more --matrix files and no --spectrum")
        else:
            if self.spectrum is not None:
                raise ValueError("simulate takes mode matrices via --matrix only")
            if self.plot is not None:
                raise ValueError("simulate does not emit plot data")
        if self.command == "extremal" and self.at is None:
            raise ValueError("extremal needs --at T")
        return self

    @property
    def source(self) -> str:
        if self.spectrum is not None:
            return f"spectrum:{self.spectrum}"
        return ",".join(str(p) for p in self.matrix) or "bundled"
