"""Switching systems with per-mode dwell windows and piecewise-constant laws."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from src.errors import InvalidInputError, NotHurwitzError
from src.models.spectrum import RealMatrix, Spectrum


@dataclass(frozen=True, eq=False)
class Mode:
    label: str
    matrix: RealMatrix
    spectrum: Spectrum
    t_cut: float
    dwell_min: float
    dwell_max: float | None = None

    def __post_init__(self) -> None:
        if any(comp.alpha >= 0 for comp in self.spectrum):
            raise NotHurwitzError(f"mode {self.label!r} is not Hurwitz: {self.spectrum.describe()}")
        if not self.dwell_min > 0:
            raise InvalidInputError(f"mode {self.label!r}: dwell_min must be > 0")
        if not (math.isfinite(self.t_cut) and self.t_cut >= 0):
            raise InvalidInputError(f"mode {self.label!r}: t_cut must be finite and >= 0")
        if self.dwell_max is not None and not self.dwell_max > self.dwell_min:
            raise InvalidInputError(f"mode {self.label!r}: dwell_max must exceed dwell_min")

    @property
    def dim(self) -> int:
        return self.matrix.dim

    @property
    def cap(self) -> float:
        """Upper dwell bound of the capped family, m + T_cut unless overridden."""
        if self.dwell_max is not None:
            return self.dwell_max
        return self.dwell_min + self.t_cut

    def window(self, capped: bool) -> tuple[float, float]:
        return self.dwell_min, self.cap if capped else math.inf


@dataclass(frozen=True, eq=False)
class SwitchingSystem:
    modes: tuple[Mode, ...]

    def __post_init__(self) -> None:
        modes = tuple(self.modes)
        if not modes:
            raise InvalidInputError("switching system needs at least one mode")
        if len({m.dim for m in modes}) != 1:
            raise InvalidInputError("all modes must share one state dimension")
        if len({m.label for m in modes}) != len(modes):
            raise InvalidInputError("mode labels must be unique")
        object.__setattr__(self, "modes", modes)

    @property
    def dim(self) -> int:
        return self.modes[0].dim

    def __len__(self) -> int:
        return len(self.modes)


@dataclass(frozen=True)
class SwitchingLaw:
    segments: tuple[tuple[int, float], ...] = ()

    def __post_init__(self) -> None:
        segs = tuple((int(i), float(d)) for i, d in self.segments)
        for k, (mode, duration) in enumerate(segs):
            if not (math.isfinite(duration) and duration > 0):
                raise InvalidInputError(f"segment {k}: duration must be finite and > 0")
            if k and segs[k - 1][0] == mode:
                raise InvalidInputError(f"segment {k}: repeats mode {mode} of the previous segment")
        object.__setattr__(self, "segments", segs)

    @property
    def total_duration(self) -> float:
        return sum(d for _, d in self.segments)

    def __len__(self) -> int:
        return len(self.segments)


@dataclass(frozen=True, eq=False)
class SimulationResult:
    final: NDArray[np.float64]
    times: NDArray[np.float64]
    norms: NDArray[np.float64]


@dataclass(frozen=True)
class SearchResult:
    law: SwitchingLaw
    exponent: float
    capped: bool
    seed: int
    rollouts: int


@dataclass(frozen=True)
class CappingProbe:
    capped: SearchResult
    uncapped: SearchResult

    @property
    def gap(self) -> float:
        return self.uncapped.exponent - self.capped.exponent
