"""Quasipolynomial basis functions t^k e^{at} cos/sin(bt) and their linear combinations."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np
from numpy.typing import ArrayLike, NDArray

from src.errors import InvalidInputError


class Phase(Enum):
    COSINE = "cos"
    SINE = "sin"


def _magnitude(times: NDArray[np.float64], power: int, alpha: float) -> NDArray[np.float64]:
    """t^k e^{alpha t}, evaluated as a single exponential of the log-magnitude."""
    if power == 0:
        return np.exp(alpha * times)
    out = np.zeros_like(times)
    nonzero = times != 0.0
    t = times[nonzero]
    sign = np.sign(t) ** power
    out[nonzero] = sign * np.exp(power * np.log(np.abs(t)) + alpha * t)
    return out


@dataclass(frozen=True)
class BasisFunction:
    power: int
    alpha: float
    beta: float = 0.0
    phase: Phase = Phase.COSINE

    def __post_init__(self) -> None:
        if self.power < 0:
            raise InvalidInputError("power must be >= 0")
        if self.beta < 0:
            raise InvalidInputError("beta must be >= 0")
        if self.beta == 0.0 and self.phase is Phase.SINE:
            raise InvalidInputError("the sine branch exists only for beta > 0")

    def values(self, times: ArrayLike) -> NDArray[np.float64]:
        t = np.asarray(times, dtype=np.float64)
        mag = _magnitude(np.atleast_1d(t), self.power, self.alpha)
        if self.beta != 0.0:
            trig = np.cos if self.phase is Phase.COSINE else np.sin
            mag = mag * trig(self.beta * np.atleast_1d(t))
        return mag.reshape(t.shape)

    def describe(self) -> str:
        parts = []
        if self.power == 1:
            parts.append("t")
        elif self.power > 1:
            parts.append(f"t^{self.power}")
        parts.append(f"exp({self.alpha:.12g}t)")
        if self.beta != 0.0:
            parts.append(f"{self.phase.value}({self.beta:.12g}t)")
        return "*".join(parts)


@dataclass(frozen=True)
class Basis:
    """Ordered basis of P_A; closed under d/dt when built from a spectrum."""

    functions: tuple[BasisFunction, ...]

    def __post_init__(self) -> None:
        funcs = tuple(self.functions)
        if not funcs:
            raise InvalidInputError("basis must not be empty")
        if len(set(funcs)) != len(funcs):
            raise InvalidInputError("basis contains duplicate functions")
        object.__setattr__(self, "functions", funcs)

    @property
    def dim(self) -> int:
        return len(self.functions)

    @cached_property
    def index(self) -> dict[BasisFunction, int]:
        return {f: i for i, f in enumerate(self.functions)}

    @cached_property
    def slowest_decay(self) -> float:
        return min(abs(f.alpha) for f in self.functions)

    @cached_property
    def max_frequency(self) -> float:
        return max(f.beta for f in self.functions)

    @property
    def is_real(self) -> bool:
        return all(f.beta == 0.0 for f in self.functions)

    def evaluate_matrix(self, times: ArrayLike) -> NDArray[np.float64]:
        """Matrix of shape (len(times), dim) with entry [j, i] = f_i(t_j)."""
        t = np.atleast_1d(np.asarray(times, dtype=np.float64))
        return np.column_stack([f.values(t) for f in self.functions])

    @cached_property
    def differentiation_matrix(self) -> NDArray[np.float64]:
        """D with (p')_coeffs = D @ p_coeffs."""
        dmat = np.zeros((self.dim, self.dim))
        for i, f in enumerate(self.functions):
            same = self._slot(f.power, f, f.phase)
            dmat[same, i] += f.alpha
            if f.power > 0:
                dmat[self._slot(f.power - 1, f, f.phase), i] += f.power
            if f.beta != 0.0:
                if f.phase is Phase.COSINE:
                    dmat[self._slot(f.power, f, Phase.SINE), i] -= f.beta
                else:
                    dmat[self._slot(f.power, f, Phase.COSINE), i] += f.beta
        dmat.setflags(write=False)
        return dmat

    def _slot(self, power: int, like: BasisFunction, phase: Phase) -> int:
        key = BasisFunction(power, like.alpha, like.beta, phase)
        try:
            return self.index[key]
        except KeyError:
            raise InvalidInputError(
                f"basis is not closed under differentiation: missing {key.describe()}"
            ) from None

    def describe(self) -> list[str]:
        return [f.describe() for f in self.functions]


@dataclass(frozen=True, eq=False)
class QuasiPolynomial:
    """p(t) = sum_i coeffs[i] * basis.functions[i](t)."""

    basis: Basis
    coeffs: NDArray[np.float64]

    def __post_init__(self) -> None:
        c = np.array(self.coeffs, dtype=np.float64).reshape(-1)
        if c.shape[0] != self.basis.dim:
            raise InvalidInputError(
                f"expected {self.basis.dim} coefficients, got {c.shape[0]}"
            )
        if not np.all(np.isfinite(c)):
            raise InvalidInputError("coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def values(self, times: ArrayLike) -> NDArray[np.float64]:
        result: NDArray[np.float64] = self.basis.evaluate_matrix(times) @ self.coeffs
        return result

    def __call__(self, t: float) -> float:
        if not math.isfinite(t):
            raise InvalidInputError("t must be finite")
        return float(self.values([t])[0])

    def _check_basis(self, other: QuasiPolynomial) -> None:
        if other.basis != self.basis:
            raise InvalidInputError("quasipolynomials live in different bases")

    def __add__(self, other: QuasiPolynomial) -> QuasiPolynomial:
        self._check_basis(other)
        return QuasiPolynomial(self.basis, self.coeffs + other.coeffs)

    def __sub__(self, other: QuasiPolynomial) -> QuasiPolynomial:
        self._check_basis(other)
        return QuasiPolynomial(self.basis, self.coeffs - other.coeffs)

    def __mul__(self, factor: float) -> QuasiPolynomial:
        return QuasiPolynomial(self.basis, self.coeffs * float(factor))

    __rmul__ = __mul__

    def __neg__(self) -> QuasiPolynomial:
        return self * -1.0
