"""
Job runners behind the CLI subcommands.

Each run_* takes a validated JobConfig and returns one report model; the
caller owns output and exit codes. run_sweep writes its own lines because
results stream out while later inputs are still being processed.
"""

from __future__ import annotations

import logging
import math
import re
import time
from collections import deque
from collections.abc import Callable
from concurrent.futures import Future, ThreadPoolExecutor
from datetime import datetime, timezone

UTC = timezone.utc  # alias of datetime.UTC (3.11+)
from pathlib import Path
from typing import TypeVar

import numpy as np
from pydantic import BaseModel, ValidationError

from src.errors import CutTailError, InvalidInputError, NotHurwitzError
from src.models.cuttail import CutTailResult
from src.models.job import JobConfig
from src.models.reports import (
    CutTailReport,
    ErrorReport,
    ExtremalReport,
    SimulateReport,
    Verify2dReport,
    law_model,
    spectrum_models,
)
from src.models.spectrum import RealMatrix, Spectrum
from src.models.switching import CappingProbe, SwitchingSystem
from src.repositories.matrix_files import parse_matrix_file, parse_spectrum
from src.repositories.output import ReportWriter
from src.repositories.plots import emit_plot_data
from src.services.chebexchange import exchange_solve
from src.services.cuttail import closed_form_cut_tail, find_cut_tail
from src.services.geometry2d import cut_tail_geometric, default_horizon, symmetrized_hull
from src.services.quasipoly import build_basis
from src.services.spectra import eigenvalues, realize, sample_trajectory
from src.services.switchsim import build_system, bundled_system, capping_probe

logger = logging.getLogger(__name__)

PLOT_SAMPLES = 2000
HORIZON_CAPS = 10.0

R = TypeVar("R", bound=BaseModel)


def exit_code_for(exc: BaseException) -> int:
    """2 for bad input (including non-Hurwitz matrices), 1 for numerical failures."""
    if isinstance(exc, NotHurwitzError | InvalidInputError | ValidationError):
        return 2
    return 1


def _stamp(cfg: JobConfig, report: R, started: float) -> R:
    if not cfg.timestamps:
        return report
    return report.model_copy(
        update={
            "wall_time": time.perf_counter() - started,
            "timestamp": datetime.now(UTC).isoformat(timespec="seconds"),
        }
    )


def load_input(cfg: JobConfig) -> tuple[Spectrum, RealMatrix]:
    """Spectrum and a matrix realizing it, from --matrix or --spectrum."""
    if cfg.spectrum is not None:
        spectrum = parse_spectrum(cfg.spectrum)
        return spectrum, realize(spectrum)
    matrix = parse_matrix_file(cfg.matrix[0])
    return eigenvalues(matrix), matrix


def _plot_label(cfg: JobConfig) -> str:
    raw = cfg.matrix[0].stem if cfg.matrix else "spectrum"
    return re.sub(r"[^A-Za-z0-9_.-]", "_", raw) or "input"


def _plot_cut_tail(cfg: JobConfig, spectrum: Spectrum, matrix: RealMatrix, t_cut: float) -> None:
    assert cfg.plot is not None
    horizon = max(2.0 * t_cut, 12.0 / spectrum.slowest_decay)
    times = np.linspace(0.0, horizon, PLOT_SAMPLES)
    x0 = np.ones(matrix.dim)
    states = sample_trajectory(matrix, x0, times)
    label = _plot_label(cfg)
    emit_plot_data(cfg.plot, label, "norm", times, states, t_cut)
    if matrix.dim == 2:
        marker = sample_trajectory(matrix, x0, [t_cut])[0]
        emit_plot_data(
            cfg.plot, label, "hull", times, states, t_cut,
            hull=symmetrized_hull(states), marker=marker,
        )
    else:
        logger.info("dimension %d: writing the norm plot only", matrix.dim)


def run_cut_tail(cfg: JobConfig) -> CutTailReport:
    started = time.perf_counter()
    spectrum, matrix = load_input(cfg)
    logger.info("cut-tail %s: spectrum %s", cfg.source, spectrum.describe())
    result = find_cut_tail(spectrum, cfg.eps, cfg.time_tol, cfg.value_tol, cfg.max_iter)
    if cfg.plot is not None:
        _plot_cut_tail(cfg, spectrum, matrix, result.t_cut)
    return _stamp(cfg, CutTailReport.of(cfg.source, spectrum, result), started)


def run_extremal(cfg: JobConfig) -> ExtremalReport:
    assert cfg.at is not None
    started = time.perf_counter()
    spectrum, _ = load_input(cfg)
    result = exchange_solve(build_basis(spectrum), cfg.at, cfg.eps, cfg.max_iter)
    logger.info("extremal value at T=%.6g in [%.12g, %.12g]", cfg.at, *result.bounds)
    return _stamp(cfg, ExtremalReport.of(cfg.source, spectrum, result), started)


def run_verify2d(cfg: JobConfig) -> Verify2dReport:
    """Exchange driver vs closed form vs geometric scan on one planar input."""
    started = time.perf_counter()
    spectrum, _ = load_input(cfg)
    if spectrum.dim_pa != 2:
        raise InvalidInputError(f"verify2d needs dim P_A = 2, got {spectrum.dim_pa}")
    exchange = find_cut_tail(spectrum, cfg.eps, cfg.time_tol, cfg.value_tol, cfg.max_iter)
    closed: CutTailResult | None = None
    if all(c.block == 1 for c in spectrum):
        closed = closed_form_cut_tail(spectrum)
    horizon = cfg.horizon if cfg.horizon is not None else default_horizon(spectrum)
    geometric = cut_tail_geometric(spectrum, horizon, cfg.samples)
    values = [exchange.t_cut, geometric] + ([closed.t_cut] if closed else [])
    discrepancy = max(values) - min(values)
    logger.info("verify2d %s: max discrepancy %.3g", cfg.source, discrepancy)
    report = Verify2dReport(
        source=cfg.source,
        spectrum=spectrum_models(spectrum),
        t_exchange=exchange.t_cut,
        t_closed_form=closed.t_cut if closed else None,
        t_geometric=geometric,
        horizon=horizon,
        samples=cfg.samples,
        max_discrepancy=discrepancy,
    )
    return _stamp(cfg, report, started)


def _system(cfg: JobConfig) -> SwitchingSystem:
    if not cfg.matrix:
        return bundled_system(cfg.dwell_min)
    modes = [(path.stem, parse_matrix_file(path)) for path in cfg.matrix]
    return build_system(modes, cfg.dwell_min, False, cfg.eps, cfg.time_tol, cfg.value_tol)


def run_simulate(cfg: JobConfig) -> SimulateReport:
    """Best capped and uncapped growth exponents over seeds seed .. seed+seeds-1."""
    started = time.perf_counter()
    system = _system(cfg)
    horizon = cfg.horizon
    if horizon is None:
        horizon = HORIZON_CAPS * max(mode.cap for mode in system.modes)
    seeds = range(cfg.seed, cfg.seed + cfg.seeds)
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        probes: list[CappingProbe] = list(
            pool.map(lambda s: capping_probe(system, horizon, cfg.budget, s), seeds)
        )
    capped = max(probes, key=lambda p: p.capped.exponent).capped
    uncapped = max(probes, key=lambda p: p.uncapped.exponent).uncapped
    gap = uncapped.exponent - capped.exponent
    if not (math.isfinite(gap) and gap >= 0):
        raise CutTailError(f"uncapped best {uncapped.exponent} fell below capped best")
    labels = [mode.label for mode in system.modes]
    logger.info(
        "simulate: capped %.6g, uncapped %.6g over %d seeds",
        capped.exponent, uncapped.exponent, cfg.seeds,
    )
    report = SimulateReport(
        source=cfg.source,
        modes=labels,
        t_cuts=[mode.t_cut for mode in system.modes],
        dwell_min=[mode.dwell_min for mode in system.modes],
        horizon=horizon,
        budget=cfg.budget,
        capped=law_model(capped, labels),
        uncapped=law_model(uncapped, labels),
        gap=gap,
    )
    return _stamp(cfg, report, started)


def error_report(cfg: JobConfig, exc: Exception) -> ErrorReport:
    code = exit_code_for(exc)
    stamp = datetime.now(UTC).isoformat(timespec="seconds") if cfg.timestamps else None
    return ErrorReport(
        source=cfg.source, error=str(exc), kind=type(exc).__name__, exit_code=code, timestamp=stamp
    )


def _sweep_one(cfg: JobConfig) -> BaseModel:
    try:
        return run_cut_tail(cfg)
    except (CutTailError, ValidationError) as exc:
        logger.error("%s failed: %s", cfg.source, exc)
        return error_report(cfg, exc)


def run_sweep(cfg: JobConfig, writer: ReportWriter, running: Callable[[], bool]) -> int:
    """
    cut-tail over every --matrix file; one line per input, in input order.

    No new input is dispatched once running() turns false; jobs already
    submitted finish and are written. Returns the worst exit code seen.
    """
    worst = 0
    pending: deque[Future[BaseModel]] = deque()

    def drain_one() -> None:
        nonlocal worst
        report = pending.popleft().result()
        if isinstance(report, ErrorReport):
            worst = max(worst, report.exit_code)
        writer.write(report)

    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        for path in cfg.matrix:
            if not running():
                logger.warning("sweep interrupted: %s and later inputs skipped", path)
                worst = max(worst, 1)
                break
            job = cfg.model_copy(update={"command": "cut-tail", "matrix": (Path(path),)})
            pending.append(pool.submit(_sweep_one, job))
            if len(pending) >= cfg.workers:
                drain_one()
        while pending:
            drain_one()
    logger.info("sweep finished, exit code %d", worst)
    return worst
