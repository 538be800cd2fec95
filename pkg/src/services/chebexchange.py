"""
Exchange algorithm for min ||p||_C[0,T] over p in P_A with p(T) = 1.

Each iteration solves the finite-point problem |p(t_j)| <= r as a linear
program (its value r is a lower bound), then maximizes |p| over the whole
segment (an upper bound) and adds the maximizers to the point set.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence

import numpy as np
from numpy.typing import NDArray

from src.errors import (
    DegenerateBasisError,
    ExchangeNotConvergedError,
    InvalidInputError,
    LinearProgramError,
)
from src.models.exchange import (
    Constraint,
    ExchangeState,
    ExtremalResult,
    LinearProgram,
    LPStatus,
    Relation,
    TraceRecord,
)
from src.models.quasipoly import Basis, QuasiPolynomial
from src.services.linprog import solve_lp
from src.services.quasipoly import AbsMaximizer

logger = logging.getLogger(__name__)

STALL_ITERATIONS = 20
MAX_DENSITY = 64


def _point_tol(horizon: float) -> float:
    return 1e-12 * max(1.0, horizon)


def _column_scale(
    basis: Basis, phi: NDArray[np.float64], phi_t: NDArray[np.float64]
) -> NDArray[np.float64]:
    scale = np.maximum(np.max(np.abs(phi), axis=0), np.abs(phi_t))
    for j, s in enumerate(scale):
        if s == 0.0:
            raise DegenerateBasisError(basis.functions[j].describe())
    return scale


def lp_subproblem(
    points: Sequence[float], basis: Basis, horizon: float
) -> tuple[float, QuasiPolynomial]:
    """Minimize r subject to |p(t_j)| <= r on points and p(horizon) = 1."""
    pts = np.asarray(points, dtype=np.float64)
    if not np.any(np.abs(pts - horizon) <= _point_tol(horizon)):
        raise InvalidInputError("the constraint point T must belong to the point set")
    phi = basis.evaluate_matrix(pts)
    phi_t = basis.evaluate_matrix([horizon])[0]
    scale = _column_scale(basis, phi, phi_t)
    phi_s = phi / scale
    dim = basis.dim
    ones = np.ones((pts.size, 1))
    rows = [Constraint(row, Relation.LE, 0.0) for row in np.hstack((phi_s, -ones))]
    rows += [Constraint(row, Relation.LE, 0.0) for row in np.hstack((-phi_s, -ones))]
    rows.append(Constraint(np.append(phi_t / scale, 0.0), Relation.EQ, 1.0))
    objective = np.zeros(dim + 1)
    objective[dim] = 1.0
    result = solve_lp(LinearProgram(objective, tuple(rows), frozenset(range(dim))))
    if result.status is not LPStatus.OPTIMAL:
        raise LinearProgramError(f"exchange subproblem ended {result.status.value}")
    coeffs = result.solution[:dim] / scale
    coeffs = coeffs / float(phi_t @ coeffs)
    return result.optimum, QuasiPolynomial(basis, coeffs)


def _pinned_subproblem(
    points: Sequence[float], basis: Basis, horizon: float, slack: float
) -> QuasiPolynomial | None:
    """
    Tie-break for a subproblem whose value is pinned at one by p(T) = 1.

    Every p with |p(t_j)| <= 1 is then optimal and the simplex vertex may
    overshoot one between the points. Among those, take the one with the
    largest margin below one away from T and p'(T) >= 0 (necessary for
    |p| <= 1 just before T). None when no such optimal p exists.
    """
    tol = _point_tol(horizon)
    others = np.asarray([t for t in points if abs(t - horizon) > tol], dtype=np.float64)
    if others.size == 0:
        return None
    phi = basis.evaluate_matrix(others)
    phi_t = basis.evaluate_matrix([horizon])[0]
    slope_t = phi_t @ basis.differentiation_matrix
    scale = _column_scale(basis, phi, phi_t)
    phi_s = phi / scale
    dim = basis.dim
    ones = np.ones((others.size, 1))
    rows = [Constraint(row, Relation.LE, 0.0) for row in np.hstack((phi_s, -ones))]
    rows += [Constraint(row, Relation.LE, 0.0) for row in np.hstack((-phi_s, -ones))]
    rows.append(Constraint(np.append(-slope_t / scale, 0.0), Relation.LE, 0.0))
    rows.append(Constraint(np.append(phi_t / scale, 0.0), Relation.EQ, 1.0))
    objective = np.zeros(dim + 1)
    objective[dim] = 1.0
    result = solve_lp(LinearProgram(objective, tuple(rows), frozenset(range(dim))))
    if result.status is not LPStatus.OPTIMAL or result.optimum > 1.0 + slack:
        return None
    coeffs = result.solution[:dim] / scale
    return QuasiPolynomial(basis, coeffs / float(phi_t @ coeffs))


def _initial_points(dim: int, horizon: float) -> list[float]:
    j = np.arange(dim)
    cheb = 0.5 * horizon * (1.0 - np.cos(math.pi * (j + 0.5) / dim))
    return sorted({*cheb.tolist(), horizon})


def _dedupe(points: Sequence[float], horizon: float) -> list[float]:
    tol = _point_tol(horizon)
    out: list[float] = []
    for t in sorted(points):
        if out and t - out[-1] <= tol:
            continue
        out.append(t)
    if abs(out[-1] - horizon) <= tol:
        out[-1] = horizon
    else:
        out.append(horizon)
    return out


def exchange_solve(
    basis: Basis,
    horizon: float,
    eps: float = 1e-6,
    max_iter: int = 500,
    decide_at: float | None = None,
) -> ExtremalResult:
    """
    Bracket the value of min ||p||_C[0,T] s.t. p(T) = 1 within eps.

    With decide_at set, stops as soon as the bracket lies entirely on one
    side of it; the decision equals the one a fully converged run takes.
    If b stays at one while B stalls on the densest grid, the run stops
    with pinned_at_one set and the value is taken to be one.
    """
    if not (math.isfinite(horizon) and horizon > 0):
        raise InvalidInputError(f"T must be finite and > 0, got {horizon}")
    if eps <= 0:
        raise InvalidInputError("eps must be > 0")

    density = 1
    maximizer = AbsMaximizer(basis, horizon, density)
    phi_t = basis.evaluate_matrix([horizon])[0]
    incumbent = QuasiPolynomial(basis, phi_t / float(phi_t @ phi_t))
    upper, _ = maximizer.maximize(incumbent)
    state = ExchangeState(
        tuple(_initial_points(basis.dim, horizon)), 1.0, max(upper, 1.0), incumbent, 0
    )
    trace: list[TraceRecord] = []
    stall = 0
    removal = True
    decided = False
    pinned_stall = False

    for k in range(1, max_iter + 1):
        r, pbar = lp_subproblem(state.points, basis, horizon)
        slack = 1e-9 * (1.0 + r)
        if r <= 1.0 + slack:
            tie_break = _pinned_subproblem(state.points, basis, horizon, slack)
            if tie_break is not None:
                pbar = tie_break
        maxima = maximizer.local_maxima(pbar)
        top = maxima[0].value
        upper, best = state.upper, state.incumbent
        if top < upper:
            upper, best = top, pbar
        lower = min(max(state.lower, r), upper)
        trace.append(TraceRecord(k, lower, upper, len(state.points)))
        logger.debug(
            "exchange T=%.6g k=%d b=%.12g B=%.12g points=%d",
            horizon, k, lower, upper, len(state.points),
        )

        change = max(lower - state.lower, state.upper - upper)
        stall = stall + 1 if change < eps / 10 else 0

        # every violating local maximum enters, not only the largest
        points = list(state.points)
        activity_tol = 1e-9 * (1.0 + upper)
        points += [m.t for m in maxima if m.value > r + slack or m.value >= top - activity_tol]
        if removal and r > 1.0 + max(eps, slack):
            values = np.abs(pbar.values(points))
            points = [
                t for t, v in zip(points, values, strict=True) if v >= r - slack or t == horizon
            ]
        state = ExchangeState(tuple(_dedupe(points, horizon)), lower, upper, best, k)

        if upper - lower < eps:
            break
        if decide_at is not None and (upper <= decide_at or lower > decide_at):
            decided = True
            break
        if stall >= STALL_ITERATIONS and density < MAX_DENSITY:
            density *= 4
            maximizer = AbsMaximizer(basis, horizon, density)
            removal = False
            stall = 0
            logger.warning(
                "exchange stalled at T=%.6g (b=%.12g, B=%.12g); grid density now %dx",
                horizon, lower, upper, density,
            )
        elif (
            stall >= STALL_ITERATIONS
            and decide_at is not None
            and decide_at >= 1.0
            and lower <= 1.0 + slack
        ):
            # the finite subproblem still has value one on the densest grid
            logger.warning(
                "exchange at T=%.6g pinned at b=1 with B=%.12g on the %dx grid; "
                "deciding value <= %.12g",
                horizon, upper, density, decide_at,
            )
            decided = pinned_stall = True
            break
    else:
        raise ExchangeNotConvergedError(max_iter, state.lower, state.upper)

    return _result(state, maximizer, horizon, trace, decided, pinned_stall)


def _result(
    state: ExchangeState,
    maximizer: AbsMaximizer,
    horizon: float,
    trace: list[TraceRecord],
    decided: bool,
    pinned_stall: bool,
) -> ExtremalResult:
    activity_tol = 1e-9 * (1.0 + state.upper)
    floor = min(state.lower, state.upper - activity_tol)
    active = sorted(m.t for m in maximizer.local_maxima(state.incumbent) if m.value >= floor)
    return ExtremalResult(
        value=state.upper,
        certificate=state.incumbent,
        active_points=tuple(active),
        bounds=(state.lower, state.upper),
        iterations=state.iteration,
        horizon=horizon,
        trace=tuple(trace),
        decided_early=decided,
        pinned_at_one=pinned_stall,
    )


def active_signs(result: ExtremalResult) -> NDArray[np.float64]:
    """Signs of the certificate at its sorted active points."""
    return np.sign(result.certificate.values(result.active_points))
