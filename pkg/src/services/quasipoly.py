"""The space P_A: basis construction, evaluation, differentiation and |p| maximization."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.typing import NDArray

from src.errors import InvalidInputError
from src.models.quasipoly import Basis, BasisFunction, Phase, QuasiPolynomial
from src.models.spectrum import Spectrum

logger = logging.getLogger(__name__)

_NEWTON_ITERATIONS = 60


def build_basis(s: Spectrum) -> Basis:
    funcs: list[BasisFunction] = []
    for comp in s:
        for k in range(comp.block):
            funcs.append(BasisFunction(k, comp.alpha, comp.beta, Phase.COSINE))
            if not comp.is_real:
                funcs.append(BasisFunction(k, comp.alpha, comp.beta, Phase.SINE))
    return Basis(tuple(funcs))


def evaluate(p: QuasiPolynomial, t: float) -> float:
    return p(t)


def derivative(p: QuasiPolynomial) -> QuasiPolynomial:
    return QuasiPolynomial(p.basis, p.basis.differentiation_matrix @ p.coeffs)


def grid_size(basis: Basis, horizon: float, density: int = 1) -> int:
    """Uniform sample count resolving every oscillation of the fastest mode."""
    per_period = math.ceil(64.0 * horizon * basis.max_frequency / (2.0 * math.pi))
    return max(2048, per_period + 64 * basis.dim) * density


@dataclass(frozen=True)
class LocalMaximum:
    t: float
    value: float


class AbsMaximizer:
    """
    Global maximizer of |p| on [0, horizon] for every p in one basis.

    Basis values on the grid are computed once, so repeated calls with new
    coefficient vectors cost one matrix-vector product plus the refinement.
    """

    def __init__(self, basis: Basis, horizon: float, density: int = 1) -> None:
        if not (math.isfinite(horizon) and horizon > 0):
            raise InvalidInputError(f"horizon must be finite and > 0, got {horizon}")
        if density < 1:
            raise InvalidInputError("grid density must be >= 1")
        self.basis = basis
        self.horizon = float(horizon)
        self.density = density
        self.grid = np.linspace(0.0, self.horizon, grid_size(basis, horizon, density))
        self.tol = 1e-12 * max(1.0, self.horizon)

    @cached_property
    def _values(self) -> NDArray[np.float64]:
        return self.basis.evaluate_matrix(self.grid)

    @cached_property
    def _d1(self) -> NDArray[np.float64]:
        return self.basis.differentiation_matrix

    @cached_property
    def _d2(self) -> NDArray[np.float64]:
        d = self.basis.differentiation_matrix
        return np.asarray(d @ d, dtype=np.float64)

    def _coeffs(self, p: QuasiPolynomial | NDArray[np.float64]) -> NDArray[np.float64]:
        if isinstance(p, QuasiPolynomial):
            if p.basis != self.basis:
                raise InvalidInputError("quasipolynomial is not in the maximizer's basis")
            return p.coeffs
        return np.asarray(p, dtype=np.float64)

    def local_maxima(
        self, p: QuasiPolynomial | NDArray[np.float64], window: float = 1e-2
    ) -> list[LocalMaximum]:
        """Refined local maxima of |p| within a relative window of the largest one."""
        c = self._coeffs(p)
        vals = self._values @ c
        mag = np.abs(vals)
        top = float(np.max(mag))
        if top == 0.0:
            return [LocalMaximum(self.horizon, 0.0)]
        left = np.concatenate(([True], mag[1:] >= mag[:-1]))
        right = np.concatenate((mag[:-1] >= mag[1:], [True]))
        idx = np.flatnonzero(left & right & (mag >= (1.0 - window) * top))
        t_ref, v_ref = self._refine(c, idx, np.sign(vals[idx]))
        keep = v_ref >= mag[idx]
        ts = np.where(keep, t_ref, self.grid[idx])
        vs = np.where(keep, v_ref, mag[idx])
        found: list[LocalMaximum] = []
        for t, v in sorted(zip(ts.tolist(), vs.tolist(), strict=True), key=lambda tv: tv[0]):
            if found and abs(t - found[-1].t) <= 1e3 * self.tol:
                if v > found[-1].value:
                    found[-1] = LocalMaximum(t, v)
                continue
            found.append(LocalMaximum(t, v))
        found.sort(key=lambda m: (-m.value, -m.t))
        return found

    def maximize(self, p: QuasiPolynomial | NDArray[np.float64]) -> tuple[float, float]:
        """(max |p| on [0, horizon], argmax); ties go to the largest argmax."""
        best = self.local_maxima(p)[0]
        return best.value, best.t

    def _derivs(
        self, c: NDArray[np.float64], t: NDArray[np.float64]
    ) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        phi = self.basis.evaluate_matrix(t)
        return phi @ (self._d1 @ c), phi @ (self._d2 @ c)

    def _refine(
        self, c: NDArray[np.float64], idx: NDArray[np.intp], sign: NDArray[np.float64]
    ) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """Safeguarded Newton on p' = 0 inside each neighbouring grid bracket."""
        last = self.grid.size - 1
        lo = self.grid[np.maximum(idx - 1, 0)].copy()
        hi = self.grid[np.minimum(idx + 1, last)].copy()
        x = self.grid[idx].copy()
        if idx.size == 0:
            return x, x
        g_lo = sign * self._derivs(c, lo)[0]
        g_hi = sign * self._derivs(c, hi)[0]
        active = (g_lo > 0) & (g_hi < 0)
        x = np.where(active, 0.5 * (lo + hi), x)
        for _ in range(_NEWTON_ITERATIONS):
            if not np.any(active):
                break
            d1, d2 = self._derivs(c, x)
            g = sign * d1
            lo = np.where(active & (g > 0), x, lo)
            hi = np.where(active & (g <= 0), x, hi)
            with np.errstate(divide="ignore", invalid="ignore"):
                step = np.where(d2 != 0.0, d1 / d2, np.nan)
            cand = x - step
            inside = np.isfinite(cand) & (cand > lo) & (cand < hi)
            cand = np.where(inside, cand, 0.5 * (lo + hi))
            settled = np.abs(cand - x) <= self.tol
            x = np.where(active, cand, x)
            active = active & ~settled & (hi - lo > self.tol)
        x = np.clip(x, 0.0, self.horizon)
        values = np.abs(self.basis.evaluate_matrix(x) @ c)
        return x, values


def sup_abs_on_interval(p: QuasiPolynomial, horizon: float, grid: int = 1) -> tuple[float, float]:
    """Global maximum of |p| on [0, horizon] with its maximizer."""
    return AbsMaximizer(p.basis, horizon, grid).maximize(p)
