"""
Switching laws under per-mode dwell windows [m, M].

Capped laws use M = m + T_cut for every mode, uncapped ones M = infinity.
worst_case_search is an empirical probe of how much the cap costs in growth
rate; it certifies nothing.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from src.errors import CutTailError, InvalidInputError
from src.models.spectrum import RealMatrix
from src.models.switching import (
    CappingProbe,
    Mode,
    SearchResult,
    SimulationResult,
    SwitchingLaw,
    SwitchingSystem,
)
from src.services.cuttail import closed_form_cut_tail, find_cut_tail
from src.services.spectra import eigenvalues, matrix_exponential, sample_trajectory

logger = logging.getLogger(__name__)

CANDIDATES = 32
LATTICE = 64
INTERIOR_SAMPLES = 10
UNCAPPED_STRETCH = 4.0

EXAMPLE_MODES: tuple[tuple[str, tuple[tuple[float, ...], ...]], ...] = (
    ("real-pair", ((-0.2, 0.0), (0.0, -0.5))),
    ("complex-pair", ((-0.1, -0.3), (0.3, -0.1))),
)


def build_system(
    modes: Sequence[tuple[str, RealMatrix]],
    dwell_min: float | Sequence[float],
    closed_form: bool = False,
    eps: float = 1e-7,
    time_tol: float = 1e-4,
    value_tol: float = 1e-6,
) -> SwitchingSystem:
    """Compute each mode's spectrum and T_cut and assemble the system."""
    if isinstance(dwell_min, int | float):
        mins = [float(dwell_min)] * len(modes)
    else:
        mins = [float(m) for m in dwell_min]
    if len(mins) != len(modes):
        raise InvalidInputError("one dwell_min per mode is required")
    built: list[Mode] = []
    for (label, matrix), m in zip(modes, mins, strict=True):
        spectrum = eigenvalues(matrix)
        if closed_form:
            t_cut = closed_form_cut_tail(spectrum).t_cut
        else:
            t_cut = find_cut_tail(spectrum, eps, time_tol, value_tol).t_cut
        logger.info("mode %s: spectrum %s, T_cut %.6g", label, spectrum.describe(), t_cut)
        built.append(Mode(label, matrix, spectrum, t_cut, m))
    return SwitchingSystem(tuple(built))


def bundled_system(dwell_min: float = 0.1) -> SwitchingSystem:
    """Two planar modes: diag(-0.2, -0.5) and the rotation-decay -0.1 +/- 0.3i."""
    modes = [(label, RealMatrix.from_rows(rows)) for label, rows in EXAMPLE_MODES]
    return build_system(modes, dwell_min, closed_form=True)


def validate_law(sys: SwitchingSystem, law: SwitchingLaw, capped: bool) -> bool:
    for mode_index, duration in law.segments:
        if not 0 <= mode_index < len(sys):
            return False
        lo, hi = sys.modes[mode_index].window(capped)
        if not lo <= duration <= hi:
            return False
    return True


def simulate(sys: SwitchingSystem, law: SwitchingLaw, x0: ArrayLike) -> SimulationResult:
    """Exact piecewise propagation with norms at segment ends and interior samples."""
    x = np.asarray(x0, dtype=np.float64).reshape(-1)
    if x.shape[0] != sys.dim:
        raise InvalidInputError(f"x0 has length {x.shape[0]}, system dimension is {sys.dim}")
    times = [0.0]
    norms = [float(np.linalg.norm(x))]
    clock = 0.0
    for mode_index, duration in law.segments:
        if not 0 <= mode_index < len(sys):
            raise InvalidInputError(f"law refers to unknown mode {mode_index}")
        matrix = sys.modes[mode_index].matrix
        local = np.linspace(0.0, duration, INTERIOR_SAMPLES + 2)[1:-1]
        inner = sample_trajectory(matrix, x, local)
        x = matrix_exponential(matrix, duration).entries @ x
        times.extend((clock + local).tolist())
        norms.extend(np.linalg.norm(inner, axis=1).tolist())
        clock += duration
        times.append(clock)
        norms.append(float(np.linalg.norm(x)))
    return SimulationResult(x, np.array(times), np.array(norms))


class _Lattice:
    """Per-mode log-spaced admissible durations with cached exponentials."""

    def __init__(self, sys: SwitchingSystem, capped: bool) -> None:
        durations = []
        for mode in sys.modes:
            lo = mode.dwell_min
            hi = mode.cap if capped else lo + UNCAPPED_STRETCH * (mode.cap - lo)
            durations.append(np.geomspace(lo, hi, LATTICE) if hi > lo else np.full(LATTICE, lo))
        self.durations = np.array(durations)
        self.exps = np.array(
            [
                [matrix_exponential(mode.matrix, float(d)).entries for d in row]
                for mode, row in zip(sys.modes, self.durations, strict=True)
            ]
        )


def _rollout(
    lattice: _Lattice, n_modes: int, dim: int, horizon: float, rng: np.random.Generator
) -> tuple[list[tuple[int, float]], float]:
    product = np.eye(dim)
    log_norm = 0.0
    total = 0.0
    segments: list[tuple[int, float]] = []
    last: int | None = None
    while total < horizon:
        allowed = np.array([i for i in range(n_modes) if i != last])
        if allowed.size == 0:
            break
        modes = rng.choice(allowed, size=CANDIDATES)
        picks = rng.integers(0, LATTICE, size=CANDIDATES)
        stacked = lattice.exps[modes, picks] @ product
        growth = np.log(np.linalg.norm(stacked, ord=2, axis=(1, 2)))
        durations = lattice.durations[modes, picks]
        # running exponent of the accumulated product
        best = int(np.argmax(growth / (total + durations)))
        product = stacked[best]
        log_norm = float(growth[best])
        duration = float(durations[best])
        segments.append((int(modes[best]), duration))
        total += duration
        last = int(modes[best])
    return segments, log_norm / total


def worst_case_search(
    sys: SwitchingSystem,
    horizon: float,
    capped: bool,
    budget: int,
    seed: int,
    incumbent: SearchResult | None = None,
) -> SearchResult:
    """Greedy randomized rollouts maximizing the growth exponent log||P|| / duration."""
    if budget < 1:
        raise InvalidInputError("budget must be >= 1")
    if not (math.isfinite(horizon) and horizon > 0):
        raise InvalidInputError("horizon must be finite and > 0")
    rng = np.random.default_rng(seed)
    lattice = _Lattice(sys, capped)
    best_law: SwitchingLaw | None = None
    best = -math.inf
    for _ in range(budget):
        segments, exponent = _rollout(lattice, len(sys), sys.dim, horizon, rng)
        if exponent > best:
            best, best_law = exponent, SwitchingLaw(tuple(segments))
    assert best_law is not None
    if incumbent is not None and incumbent.exponent > best:
        best, best_law = incumbent.exponent, incumbent.law
    logger.debug("worst-case search capped=%s seed=%d exponent %.6g", capped, seed, best)
    return SearchResult(best_law, best, capped, seed, budget)


def capping_probe(sys: SwitchingSystem, horizon: float, budget: int, seed: int) -> CappingProbe:
    """Capped search, then uncapped search seeded with the capped winner."""
    capped = worst_case_search(sys, horizon, True, budget, seed)
    if not validate_law(sys, capped.law, capped=False):
        raise CutTailError("capped law is not admissible without the cap")
    uncapped = worst_case_search(sys, horizon, False, budget, seed, incumbent=capped)
    if uncapped.exponent < capped.exponent:
        raise CutTailError("uncapped search fell below its capped incumbent")
    return CappingProbe(capped, uncapped)


def growth_exponent(sys: SwitchingSystem, law: SwitchingLaw) -> float:
    """log of the spectral norm of the law's transition matrix per unit time."""
    product: NDArray[np.float64] = np.eye(sys.dim)
    for mode_index, duration in law.segments:
        product = matrix_exponential(sys.modes[mode_index].matrix, duration).entries @ product
    return float(np.log(np.linalg.norm(product, 2)) / law.total_duration)
