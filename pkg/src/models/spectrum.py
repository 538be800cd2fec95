"""Real system matrices and their clustered spectra."""

from __future__ import annotations

import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from src.errors import InvalidInputError


@dataclass(frozen=True, eq=False)
class RealMatrix:
    """A square matrix with finite real entries, stored read-only."""

    entries: NDArray[np.float64]

    def __post_init__(self) -> None:
        data = np.array(self.entries, dtype=np.float64)
        if data.ndim != 2 or data.shape[0] != data.shape[1] or data.shape[0] == 0:
            raise InvalidInputError(f"matrix must be square and nonempty, got shape {data.shape}")
        if not np.all(np.isfinite(data)):
            raise InvalidInputError("matrix entries must be finite")
        data.setflags(write=False)
        object.__setattr__(self, "entries", data)

    @classmethod
    def from_rows(cls, rows: ArrayLike) -> RealMatrix:
        return cls(np.asarray(rows, dtype=np.float64))

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    @property
    def row_sum_norm(self) -> float:
        return float(np.max(np.sum(np.abs(self.entries), axis=1)))


@dataclass(frozen=True)
class SpectralComponent:
    """One eigenvalue alpha + i*beta (beta >= 0) and its largest Jordan block."""

    alpha: float
    beta: float = 0.0
    block: int = 1

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise InvalidInputError("spectral component must be finite")
        if self.beta < 0:
            raise InvalidInputError(f"beta must be >= 0 (conjugates stored once), got {self.beta}")
        if self.block < 1:
            raise InvalidInputError(f"block size must be >= 1, got {self.block}")

    @property
    def is_real(self) -> bool:
        return self.beta == 0.0

    @property
    def weight(self) -> int:
        """Number of basis functions this component contributes to P_A."""
        return self.block * (1 if self.is_real else 2)

    def scaled(self, factor: float) -> SpectralComponent:
        return SpectralComponent(self.alpha * factor, self.beta * factor, self.block)

    def describe(self) -> str:
        text = f"{self.alpha:.12g}"
        if not self.is_real:
            text += f"+{self.beta:.12g}i"
        if self.block > 1:
            text += f":{self.block}"
        return text


@dataclass(frozen=True)
class Spectrum:
    """Conjugate-closed eigenvalue data of a real matrix."""

    components: tuple[SpectralComponent, ...]

    def __post_init__(self) -> None:
        comps = tuple(self.components)
        if not comps:
            raise InvalidInputError("spectrum must have at least one component")
        seen: set[tuple[float, float]] = set()
        for comp in comps:
            key = (comp.alpha, comp.beta)
            if key in seen:
                raise InvalidInputError(f"duplicate spectral component {comp.describe()}")
            seen.add(key)
        object.__setattr__(self, "components", comps)

    @classmethod
    def of(cls, *triples: Sequence[float] | SpectralComponent) -> Spectrum:
        """Build from SpectralComponents or (alpha, beta[, block]) tuples."""
        comps: list[SpectralComponent] = []
        for item in triples:
            if isinstance(item, SpectralComponent):
                comps.append(item)
            else:
                alpha, beta, *rest = item
                block = int(rest[0]) if rest else 1
                comps.append(SpectralComponent(float(alpha), float(beta), block))
        return cls(tuple(comps))

    @property
    def dim_pa(self) -> int:
        return sum(comp.weight for comp in self.components)

    @property
    def slowest_decay(self) -> float:
        """min |alpha| over the components; sets the natural time scale."""
        return min(abs(comp.alpha) for comp in self.components)

    @property
    def max_frequency(self) -> float:
        return max(comp.beta for comp in self.components)

    @property
    def is_real(self) -> bool:
        return all(comp.is_real for comp in self.components)

    def scaled(self, factor: float) -> Spectrum:
        """Spectrum of factor * A."""
        if factor <= 0:
            raise InvalidInputError("time-scaling factor must be positive")
        return Spectrum(tuple(comp.scaled(factor) for comp in self.components))

    def describe(self) -> str:
        return ", ".join(comp.describe() for comp in self.components)

    def __iter__(self) -> Iterator[SpectralComponent]:
        return iter(self.components)

    def __len__(self) -> int:
        return len(self.components)
