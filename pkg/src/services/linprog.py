"""Dense two-phase tableau simplex with Bland's anti-cycling rule."""

from __future__ import annotations

import logging

import numpy as np
from numpy.typing import NDArray

from src.errors import LinearProgramError
from src.models.exchange import LinearProgram, LPResult, LPStatus, Relation

logger = logging.getLogger(__name__)

COST_TOL = 1e-10
PIVOT_TOL = 1e-9


def _pivot(tab: NDArray[np.float64], row: int, col: int) -> None:
    tab[row] /= tab[row, col]
    factors = tab[:, col].copy()
    factors[row] = 0.0
    tab -= np.outer(factors, tab[row])


def _simplex(
    tab: NDArray[np.float64],
    basis: list[int],
    cost: NDArray[np.float64],
    allowed: NDArray[np.bool_],
    max_pivots: int,
) -> tuple[LPStatus, int]:
    """Minimize cost over tab = [A | b] in canonical form for `basis`."""
    pivots = 0
    while True:
        reduced = cost - cost[basis] @ tab[:, :-1]
        entering = np.flatnonzero(allowed & (reduced < -COST_TOL))
        if entering.size == 0:
            return LPStatus.OPTIMAL, pivots
        col = int(entering[0])
        column = tab[:, col]
        rows = np.flatnonzero(column > PIVOT_TOL)
        if rows.size == 0:
            return LPStatus.UNBOUNDED, pivots
        ratios = tab[rows, -1] / column[rows]
        best = ratios.min()
        ties = rows[ratios <= best + PIVOT_TOL * max(1.0, abs(best))]
        row = int(min(ties, key=lambda r: basis[r]))
        _pivot(tab, row, col)
        basis[row] = col
        pivots += 1
        if pivots > max_pivots:
            raise LinearProgramError(f"simplex exceeded {max_pivots} pivots")


def solve_lp(lp: LinearProgram) -> LPResult:
    """
    Minimize lp.objective @ x over the rows of lp.

    Free variables are split into differences of nonnegative ones; each <= row
    gets a slack; rows with a negative bound are negated; artificials are added
    only where no slack can start the basis.
    """
    n = lp.variable_count
    columns: list[tuple[int, float]] = []
    for j in range(n):
        columns.append((j, 1.0))
        if j in lp.free_variables:
            columns.append((j, -1.0))
    n_split = len(columns)
    m = len(lp.rows)
    if m == 0:
        bounded = all(lp.objective[j] == 0 or j not in lp.free_variables for j in range(n))
        if bounded and np.all(lp.objective >= 0):
            return LPResult(LPStatus.OPTIMAL, 0.0, np.zeros(n))
        return LPResult(LPStatus.UNBOUNDED, -np.inf, np.zeros(n))

    n_slack = sum(row.relation is Relation.LE for row in lp.rows)
    a = np.zeros((m, n_split + n_slack))
    b = np.zeros(m)
    starter: list[int | None] = []
    slack = n_split
    for i, row in enumerate(lp.rows):
        for k, (j, sign) in enumerate(columns):
            a[i, k] = sign * row.coeffs[j]
        b[i] = row.bound
        slack_col: int | None = None
        if row.relation is Relation.LE:
            a[i, slack] = 1.0
            slack_col = slack
            slack += 1
        if b[i] < 0:
            a[i] = -a[i]
            b[i] = -b[i]
            slack_col = None
        starter.append(slack_col)

    need_artificial = [i for i, s in enumerate(starter) if s is None]
    n_real = a.shape[1]
    n_total = n_real + len(need_artificial)
    tab = np.zeros((m, n_total + 1))
    tab[:, :n_real] = a
    tab[:, -1] = b
    basis: list[int] = []
    art = n_real
    for i, s in enumerate(starter):
        if s is None:
            tab[i, art] = 1.0
            basis.append(art)
            art += 1
        else:
            basis.append(s)

    max_pivots = 50 * (m + n_total)
    pivots = 0
    if need_artificial:
        phase1 = np.zeros(n_total)
        phase1[n_real:] = 1.0
        _, pivots = _simplex(tab, basis, phase1, np.ones(n_total, dtype=bool), max_pivots)
        infeasibility = float(phase1[basis] @ tab[:, -1])
        if infeasibility > PIVOT_TOL * (1.0 + float(np.max(np.abs(b)))):
            logger.debug("LP infeasible: phase-one residual %.3g", infeasibility)
            return LPResult(LPStatus.INFEASIBLE, np.nan, np.full(n, np.nan), pivots)
        tab, basis = _drop_artificials(tab, basis, n_real)

    cost = np.zeros(n_total)
    for k, (j, sign) in enumerate(columns):
        cost[k] = sign * lp.objective[j]
    allowed = np.zeros(n_total, dtype=bool)
    allowed[:n_real] = True
    status, extra = _simplex(tab, basis, cost, allowed, max_pivots)
    pivots += extra
    if status is LPStatus.UNBOUNDED:
        return LPResult(status, -np.inf, np.full(n, np.nan), pivots)

    split = np.zeros(n_total)
    split[basis] = tab[:, -1]
    x = np.zeros(n)
    for k, (j, sign) in enumerate(columns):
        x[j] += sign * split[k]
    logger.debug("LP solved: %d rows, %d columns, %d pivots", m, n_total, pivots)
    return LPResult(LPStatus.OPTIMAL, float(lp.objective @ x), x, pivots)


def _drop_artificials(
    tab: NDArray[np.float64], basis: list[int], n_real: int
) -> tuple[NDArray[np.float64], list[int]]:
    """Pivot artificials out of the basis; rows where that is impossible are redundant."""
    redundant: list[int] = []
    for row, col in enumerate(basis):
        if col < n_real:
            continue
        candidates = np.flatnonzero(np.abs(tab[row, :n_real]) > PIVOT_TOL)
        if candidates.size == 0:
            redundant.append(row)
            continue
        entering = int(candidates[0])
        _pivot(tab, row, entering)
        basis[row] = entering
    if redundant:
        keep = [r for r in range(len(basis)) if r not in redundant]
        tab = tab[keep]
        basis = [basis[r] for r in keep]
    return tab, basis
