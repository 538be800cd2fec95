"""Linear programs and the state/result of the exchange loop."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from numpy.typing import NDArray

from src.errors import InvalidInputError
from src.models.quasipoly import QuasiPolynomial


class Relation(Enum):
    LE = "<="
    EQ = "="


@dataclass(frozen=True, eq=False)
class Constraint:
    coeffs: NDArray[np.float64]
    relation: Relation
    bound: float

    def __post_init__(self) -> None:
        c = np.array(self.coeffs, dtype=np.float64).reshape(-1)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """minimize objective @ x subject to rows; x >= 0 except for free_variables."""

    objective: NDArray[np.float64]
    rows: tuple[Constraint, ...]
    free_variables: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        obj = np.array(self.objective, dtype=np.float64).reshape(-1)
        obj.setflags(write=False)
        object.__setattr__(self, "objective", obj)
        object.__setattr__(self, "rows", tuple(self.rows))
        object.__setattr__(self, "free_variables", frozenset(self.free_variables))
        n = obj.shape[0]
        if n == 0:
            raise InvalidInputError("linear program needs at least one variable")
        for i, row in enumerate(self.rows):
            if row.coeffs.shape[0] != n:
                raise InvalidInputError(
                    f"row {i} has {row.coeffs.shape[0]} coefficients, expected {n}"
                )
        if any(not 0 <= j < n for j in self.free_variables):
            raise InvalidInputError("free variable index out of range")

    @property
    def variable_count(self) -> int:
        return int(self.objective.shape[0])


class LPStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True, eq=False)
class LPResult:
    status: LPStatus
    optimum: float
    solution: NDArray[np.float64]
    pivots: int = 0


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    lower: float
    upper: float
    points: int


@dataclass(frozen=True, eq=False)
class ExchangeState:
    """Snapshot of one exchange iteration; lower <= upper always."""

    points: tuple[float, ...]
    lower: float
    upper: float
    incumbent: QuasiPolynomial
    iteration: int

    def __post_init__(self) -> None:
        if self.lower > self.upper:
            raise InvalidInputError(f"bracket inverted: [{self.lower}, {self.upper}]")

    @property
    def gap(self) -> float:
        return self.upper - self.lower


@dataclass(frozen=True, eq=False)
class ExtremalResult:
    value: float
    certificate: QuasiPolynomial
    active_points: tuple[float, ...]
    bounds: tuple[float, float]
    iterations: int
    horizon: float
    trace: tuple[TraceRecord, ...] = ()
    decided_early: bool = False
    # b stayed at one while B stalled above the threshold on the densest grid
    pinned_at_one: bool = False

    @property
    def gap(self) -> float:
        return self.bounds[1] - self.bounds[0]
