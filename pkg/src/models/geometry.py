"""Planar symmetrized hulls."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.typing import NDArray

from src.errors import DegenerateHullError


class Interiority(Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    EXTERIOR = "exterior"


@dataclass(frozen=True, eq=False)
class PlanarHull:
    """Convex polygon, vertices counterclockwise, shape (k, 2)."""

    vertices: NDArray[np.float64]
    symmetric: bool = True

    def __post_init__(self) -> None:
        v = np.array(self.vertices, dtype=np.float64)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
            raise DegenerateHullError(f"hull needs at least 3 planar vertices, got shape {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @property
    def edges(self) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """(start points, edge vectors)."""
        start = self.vertices
        return start, np.roll(start, -1, axis=0) - start

    @property
    def area(self) -> float:
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))

    @property
    def diameter(self) -> float:
        diff = self.vertices[:, None, :] - self.vertices[None, :, :]
        return float(np.max(np.hypot(diff[..., 0], diff[..., 1])))
