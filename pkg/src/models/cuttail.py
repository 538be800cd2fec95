"""Results of the cut-tail computation."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from src.errors import InvalidInputError
from src.models.quasipoly import QuasiPolynomial


class Method(Enum):
    EXCHANGE_BISECTION = "exchange-bisection"
    CLOSED_FORM_REAL = "closed-form-real"
    CLOSED_FORM_COMPLEX = "closed-form-complex"


@dataclass(frozen=True)
class PredicateEvaluation:
    horizon: float
    lower: float
    upper: float
    inside: bool
    iterations: int


@dataclass(frozen=True, eq=False)
class CutTailResult:
    t_cut: float
    bracket: tuple[float, float]
    method: Method
    certificate: QuasiPolynomial | None = None
    predicate_evals: tuple[PredicateEvaluation, ...] = ()
    degenerate: bool = False

    def __post_init__(self) -> None:
        lo, hi = self.bracket
        if not lo <= self.t_cut <= hi:
            raise InvalidInputError(f"t_cut {self.t_cut} outside bracket [{lo}, {hi}]")

    @property
    def width(self) -> float:
        return self.bracket[1] - self.bracket[0]
