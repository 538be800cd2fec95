"""Scalar root finding on bracketing intervals."""

from __future__ import annotations

import math
from collections.abc import Callable

from src.errors import RootFindingError

ScalarFn = Callable[[float], float]


def _opposite(fa: float, fb: float) -> bool:
    return (fa < 0 < fb) or (fb < 0 < fa)


def safeguarded_newton(
    f: ScalarFn,
    df: ScalarFn,
    lo: float,
    hi: float,
    tol: float = 1e-13,
    max_iter: int = 100,
) -> float:
    """Newton steps kept inside a shrinking sign-change bracket, bisecting when a step leaves it."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if not _opposite(flo, fhi):
        raise RootFindingError(f"[{lo:.12g}, {hi:.12g}] is not a sign-change interval")
    x = 0.5 * (lo + hi)
    for _ in range(max_iter):
        fx = f(x)
        if fx == 0.0:
            return x
        if _opposite(flo, fx):
            hi = x
        else:
            lo, flo = x, fx
        slope = df(x)
        step_ok = slope != 0.0 and math.isfinite(slope)
        candidate = x - fx / slope if step_ok else math.nan
        if not (lo < candidate < hi):
            candidate = 0.5 * (lo + hi)
        if abs(candidate - x) <= tol * max(1.0, abs(x)) or hi - lo <= tol * max(1.0, abs(x)):
            return candidate
        x = candidate
    raise RootFindingError(f"Newton iteration did not settle in [{lo:.12g}, {hi:.12g}]")


def expand_bracket(
    f: ScalarFn, lo: float, hi: float, factor: float = 2.0, max_steps: int = 60
) -> tuple[float, float]:
    """Grow hi geometrically, moving lo up behind it, until f changes sign on [lo, hi]."""
    if not (hi > lo and factor > 1 and hi > 0):
        raise RootFindingError("bracket expansion needs hi > max(lo, 0) and factor > 1")
    flo = f(lo)
    for _ in range(max_steps):
        fhi = f(hi)
        if fhi == 0.0 or _opposite(flo, fhi):
            return lo, hi
        lo, flo = hi, fhi
        hi *= factor
    raise RootFindingError(f"no sign change found up to t = {hi:.6g}")


def first_sign_change(
    f: ScalarFn, lo: float, hi: float, steps: int = 512
) -> tuple[float, float]:
    """Leftmost subinterval of a uniform scan of (lo, hi] on which f changes sign."""
    prev_t = lo
    prev = f(lo)
    for k in range(1, steps + 1):
        t = lo + (hi - lo) * k / steps
        val = f(t)
        if val == 0.0 or _opposite(prev, val):
            return prev_t, t
        prev_t, prev = t, val
    raise RootFindingError(f"no sign change on ({lo:.12g}, {hi:.12g}]")
