"""
Locating the cut-tail point.

The extremal value equals one exactly while x(T) is still on the boundary
of the symmetrized hull of the arc [0, T], i.e. for T <= T_cut; past T_cut
it exceeds one. The flip is located by doubling then bisection. For
two-dimensional spectra without multiple eigenvalues closed forms exist.
"""

from __future__ import annotations

import logging
import math

from src.errors import InvalidInputError, NotHurwitzError, NumericalError
from src.models.cuttail import CutTailResult, Method, PredicateEvaluation
from src.models.exchange import ExtremalResult
from src.models.quasipoly import Basis
from src.models.spectrum import Spectrum
from src.services.chebexchange import exchange_solve
from src.services.quasipoly import build_basis
from src.services.spectra import is_hurwitz
from src.utils.roots import expand_bracket, first_sign_change, safeguarded_newton

logger = logging.getLogger(__name__)

MAX_DOUBLINGS = 60


def _evaluate(
    basis: Basis, horizon: float, eps: float, value_tol: float, max_iter: int
) -> tuple[bool, ExtremalResult]:
    threshold = 1.0 + value_tol
    result = exchange_solve(basis, horizon, eps, max_iter, decide_at=threshold)
    return result.value <= threshold or result.pinned_at_one, result


def boundary_predicate(
    basis: Basis,
    horizon: float,
    eps: float = 1e-7,
    value_tol: float = 1e-6,
    max_iter: int = 500,
) -> bool:
    """True iff x(T) still lies on the hull boundary, i.e. T <= T_cut."""
    inside, _ = _evaluate(basis, horizon, eps, value_tol, max_iter)
    return inside


def find_cut_tail(
    s: Spectrum,
    eps: float = 1e-7,
    time_tol: float = 1e-4,
    value_tol: float = 1e-6,
    max_iter: int = 500,
) -> CutTailResult:
    if not is_hurwitz(s):
        raise NotHurwitzError(f"spectrum {s.describe()} is not Hurwitz: need Re(lambda) < 0")
    if time_tol <= 0:
        raise InvalidInputError("time_tol must be > 0")
    if s.dim_pa == 1:
        logger.info("dim P_A = 1: the trajectory is a ray, T_cut = 0 by convention")
        return CutTailResult(0.0, (0.0, 0.0), Method.CLOSED_FORM_REAL, degenerate=True)

    basis = build_basis(s)
    evals: list[PredicateEvaluation] = []

    def check(horizon: float) -> tuple[bool, ExtremalResult]:
        inside, result = _evaluate(basis, horizon, eps, value_tol, max_iter)
        lower, upper = result.bounds
        evals.append(PredicateEvaluation(horizon, lower, upper, inside, result.iterations))
        logger.debug("predicate T=%.9g value in [%.12g, %.12g]: %s", horizon, lower, upper, inside)
        return inside, result

    start = 1.0 / s.slowest_decay
    inside, first = check(start)
    lo_result: ExtremalResult | None = first if inside else None
    lo, hi = (start, 2.0 * start) if inside else (0.5 * start, start)
    for _ in range(MAX_DOUBLINGS):
        query_t = hi if inside else lo
        ok, result = check(query_t)
        if inside and not ok:
            break
        if not inside and ok:
            lo_result = result
            break
        if inside:
            lo, hi, lo_result = hi, 2.0 * hi, result
        else:
            lo, hi = 0.5 * lo, lo
    else:
        raise NumericalError(f"no boundary flip found within {MAX_DOUBLINGS} doublings")
    logger.info("cut-tail bracket [%.9g, %.9g] for %s", lo, hi, s.describe())

    while hi - lo > time_tol:
        mid = 0.5 * (lo + hi)
        ok, result = check(mid)
        if ok:
            lo, lo_result = mid, result
        else:
            hi = mid

    t_cut = 0.5 * (lo + hi)
    logger.info("T_cut = %.9g (bracket width %.3g, %d evaluations)", t_cut, hi - lo, len(evals))
    return CutTailResult(
        t_cut=t_cut,
        bracket=(lo, hi),
        method=Method.EXCHANGE_BISECTION,
        certificate=lo_result.certificate if lo_result is not None else None,
        predicate_evals=tuple(evals),
    )


def cut_tail_2d_real(a1: float, a2: float) -> float:
    """Unique positive root of (1 + e^{-a1 t})/a1 = (1 + e^{-a2 t})/a2."""
    if not (a1 < 0 and a2 < 0):
        raise InvalidInputError("both exponents must be negative")
    if a1 == a2:
        raise InvalidInputError("exponents must be distinct")
    u, v = sorted((abs(a1), abs(a2)))
    gap = v - u

    # multiplied through by e^{-vt}/(uv): increasing and concave with h(0) < 0
    def h(t: float) -> float:
        return u + (u - v) * math.exp(-v * t) - v * math.exp(-gap * t)

    def dh(t: float) -> float:
        return v * gap * (math.exp(-v * t) + math.exp(-gap * t))

    lo, hi = expand_bracket(h, 0.0, 1.0 / u)
    return safeguarded_newton(h, dh, lo, hi)


def cut_tail_2d_complex(alpha: float, beta: float) -> float:
    """Smallest positive root of alpha sin(bt) + beta cos(bt) + beta e^{alpha t}."""
    if not alpha < 0:
        raise InvalidInputError("alpha must be negative")
    if not beta > 0:
        raise InvalidInputError("beta must be positive")

    def g(t: float) -> float:
        bt = beta * t
        return alpha * math.sin(bt) + beta * math.cos(bt) + beta * math.exp(alpha * t)

    def dg(t: float) -> float:
        bt = beta * t
        return alpha * beta * (math.cos(bt) + math.exp(alpha * t)) - beta * beta * math.sin(bt)

    lo, hi = first_sign_change(g, 0.0, 2.0 * math.pi / beta)
    return safeguarded_newton(g, dg, lo, hi)


def closed_form_cut_tail(s: Spectrum) -> CutTailResult:
    """T_cut of a two-dimensional spectrum with simple eigenvalues."""
    comps = s.components
    if s.dim_pa != 2 or any(c.block > 1 for c in comps):
        raise InvalidInputError(
            f"closed forms need two simple eigenvalues, got {s.describe()}"
        )
    if not is_hurwitz(s):
        raise NotHurwitzError(f"spectrum {s.describe()} is not Hurwitz")
    if s.is_real:
        t = cut_tail_2d_real(comps[0].alpha, comps[1].alpha)
        method = Method.CLOSED_FORM_REAL
    else:
        t = cut_tail_2d_complex(comps[0].alpha, comps[0].beta)
        method = Method.CLOSED_FORM_COMPLEX
    return CutTailResult(t, (t, t), method)
