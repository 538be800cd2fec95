"""
Real-matrix analysis: eigenvalues with Jordan-structure reconciliation,
the Hurwitz test, the degree of the minimal polynomial, e^{tA} and sampled
trajectories.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from src.errors import (
    EigenvalueConvergenceError,
    InvalidInputError,
    MatrixExponentialOverflowError,
)
from src.models.spectrum import RealMatrix, SpectralComponent, Spectrum

logger = logging.getLogger(__name__)

_EPS = float(np.finfo(np.float64).eps)
_PADE_ORDER = 6
_EXCEPTIONAL_SHIFT_EVERY = 10


# ---------------------------------------------------------------------------
# Eigenvalues
# ---------------------------------------------------------------------------


def _hessenberg(a: NDArray[np.float64]) -> NDArray[np.float64]:
    """Householder reduction to upper Hessenberg form (similarity)."""
    h = a.copy()
    n = h.shape[0]
    for k in range(n - 2):
        v = h[k + 1 :, k].copy()
        norm = float(np.linalg.norm(v))
        if norm == 0.0:
            continue
        v[0] += math.copysign(norm, v[0])
        v /= np.linalg.norm(v)
        h[k + 1 :, k:] -= 2.0 * np.outer(v, v @ h[k + 1 :, k:])
        h[:, k + 1 :] -= 2.0 * np.outer(h[:, k + 1 :] @ v, v)
    return h


def _eig2x2(block: NDArray[np.float64]) -> list[complex]:
    a, b = float(block[0, 0]), float(block[0, 1])
    c, d = float(block[1, 0]), float(block[1, 1])
    mid = 0.5 * (a + d)
    half = 0.5 * (a - d)
    disc = half * half + b * c
    if disc >= 0.0:
        root = math.sqrt(disc)
        lam1 = mid + math.copysign(root, mid) if mid != 0.0 else mid + root
        det = a * d - b * c
        lam2 = det / lam1 if lam1 != 0.0 else mid - root
        return [complex(lam1), complex(lam2)]
    im = math.sqrt(-disc)
    return [complex(mid, im), complex(mid, -im)]


def _qr_eigenvalues(h: NDArray[np.float64], max_sweeps: int) -> list[complex]:
    """Double-shift QR on a Hessenberg matrix, deflating 1x1 and 2x2 blocks."""
    h = h.copy()
    scale = max(float(np.max(np.abs(h))), np.finfo(np.float64).tiny)
    eigs: list[complex] = []
    hi = h.shape[0] - 1
    sweeps = 0
    since_deflation = 0
    while hi >= 0:
        lo = hi
        while lo > 0:
            ref = abs(h[lo - 1, lo - 1]) + abs(h[lo, lo]) or scale
            if abs(h[lo, lo - 1]) <= 4.0 * _EPS * ref:
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            eigs.append(complex(h[hi, hi]))
            hi -= 1
            since_deflation = 0
            continue
        if lo == hi - 1:
            eigs.extend(_eig2x2(h[lo : hi + 1, lo : hi + 1]))
            hi -= 2
            since_deflation = 0
            continue
        sweeps += 1
        since_deflation += 1
        if sweeps > max_sweeps:
            raise EigenvalueConvergenceError(
                f"QR iteration did not converge in {max_sweeps} sweeps"
            )
        block = h[lo : hi + 1, lo : hi + 1]
        if since_deflation % _EXCEPTIONAL_SHIFT_EVERY == 0:
            w = abs(h[hi, hi - 1]) + abs(h[hi - 1, hi - 2])
            centre = h[hi, hi] + 0.75 * w
            shift_sum, shift_prod = 2.0 * centre, centre * centre + w * w
        else:
            trailing = h[hi - 1 : hi + 1, hi - 1 : hi + 1]
            shift_sum = float(np.trace(trailing))
            shift_prod = float(np.linalg.det(trailing))
        size = hi - lo + 1
        shifted = block @ block - shift_sum * block + shift_prod * np.eye(size)
        q, _ = np.linalg.qr(shifted)
        h[lo : hi + 1, lo : hi + 1] = np.triu(q.T @ block @ q, -1)
    return eigs


@dataclass
class _Cluster:
    centre: complex
    multiplicity: int
    block: int = 1

    @property
    def is_real(self) -> bool:
        return self.centre.imag == 0.0

    @property
    def weight(self) -> int:
        return 1 if self.is_real else 2

    def absorb(self, other: _Cluster) -> None:
        total = self.multiplicity + other.multiplicity
        self.centre = (self.centre * self.multiplicity + other.centre * other.multiplicity) / total
        self.multiplicity = total


def _cluster(values: Sequence[complex], radius: float) -> list[_Cluster]:
    out: list[_Cluster] = []
    for value in values:
        for cl in out:
            if abs(cl.centre - value) <= radius:
                cl.absorb(_Cluster(value, 1))
                break
        else:
            out.append(_Cluster(value, 1))
    return out


def _merge_within(
    clusters: list[_Cluster], radius: float, defective: Callable[[complex, int], bool]
) -> list[_Cluster]:
    """
    Merge same-kind clusters within radius when the merged eigenvalue is defective.

    Near-real pairs collapse onto the axis under the same test. Close but
    semisimple eigenvalues stay apart.
    """
    flattened = [
        _Cluster(complex(cl.centre.real, 0.0), 2 * cl.multiplicity)
        if not cl.is_real
        and 2.0 * cl.centre.imag <= radius
        and defective(complex(cl.centre.real, 0.0), 2 * cl.multiplicity)
        else cl
        for cl in clusters
    ]
    merged: list[_Cluster] = []
    for cl in sorted(flattened, key=lambda c: (c.centre.real, c.centre.imag)):
        for target in merged:
            if target.is_real != cl.is_real or abs(target.centre - cl.centre) > radius:
                continue
            total = target.multiplicity + cl.multiplicity
            centre = (target.centre * target.multiplicity + cl.centre * cl.multiplicity) / total
            if defective(centre, total):
                target.absorb(cl)
                break
        else:
            merged.append(cl)
    return merged


def _geometric_multiplicity(a: NDArray[np.float64], centre: complex, radius: float) -> int:
    """Number of singular values of a - centre*I at or below radius."""
    shifted = a - centre * np.eye(a.shape[0])
    sigma = np.linalg.svd(shifted, compute_uv=False)
    return int(np.count_nonzero(sigma <= radius))


def _implied_degree(clusters: Sequence[_Cluster]) -> int:
    return sum(cl.block * cl.weight for cl in clusters)


def _merge_closest(clusters: list[_Cluster]) -> None:
    """Merge the closest pair; a complex cluster may merge with its own conjugate."""
    best: tuple[float, int, int] | None = None
    for i, a in enumerate(clusters):
        if not a.is_real:
            dist = 2.0 * a.centre.imag
            if best is None or dist < best[0]:
                best = (dist, i, i)
        for j in range(i + 1, len(clusters)):
            dist = abs(a.centre - clusters[j].centre)
            if best is None or dist < best[0]:
                best = (dist, i, j)
    assert best is not None
    _, i, j = best
    if i == j:
        cl = clusters[i]
        clusters[i] = _Cluster(complex(cl.centre.real, 0.0), 2 * cl.multiplicity)
        return
    a, b = clusters[i], clusters[j]
    if a.is_real != b.is_real:
        real_part = a.centre.real * a.multiplicity * a.weight
        real_part += b.centre.real * b.multiplicity * b.weight
        total = a.multiplicity * a.weight + b.multiplicity * b.weight
        clusters[i] = _Cluster(complex(real_part / total, 0.0), total)
    else:
        a.absorb(b)
    del clusters[j]


def _assign_blocks(clusters: list[_Cluster], degree: int) -> None:
    extra = degree - _implied_degree(clusters)
    while extra > 0:
        candidates = [
            cl for cl in clusters if cl.block < cl.multiplicity and cl.weight <= extra
        ]
        if not candidates:
            logger.warning(
                "Jordan blocks reach degree %d of the Krylov degree %d",
                _implied_degree(clusters),
                degree,
            )
            return
        chosen = max(candidates, key=lambda c: (c.multiplicity - c.block, c.multiplicity))
        chosen.block += 1
        extra -= chosen.weight


def eigenvalues(
    m: RealMatrix,
    cluster_tol: float | None = None,
    rank_tol: float = 1e-8,
) -> Spectrum:
    """
    Eigenvalues of m grouped into conjugate-closed components.

    Eigenvalues within cluster_tol are merged. A defective eigenvalue splits
    under rounding by O(sqrt(cluster_tol)), so a second pass merges at that
    radius, but only where m - lambda*I has fewer small singular values than
    the merged multiplicity. Block sizes are then raised until the total matches
    minimal_poly_degree.
    """
    scale = 1.0 + m.row_sum_norm
    tol = 1e-8 * scale if cluster_tol is None else cluster_tol
    if tol <= 0:
        raise InvalidInputError("cluster_tol must be > 0")
    d = m.dim
    raw = _qr_eigenvalues(_hessenberg(m.entries), max_sweeps=100 * d * d)

    upper: list[complex] = []
    for lam in raw:
        if abs(lam.imag) <= tol:
            upper.append(complex(lam.real, 0.0))
        elif lam.imag > 0:
            upper.append(lam)
    clusters = _cluster(upper, tol)
    radius = math.sqrt(tol * scale)
    a = m.entries
    clusters = _merge_within(
        clusters,
        radius,
        lambda centre, count: _geometric_multiplicity(a, centre, radius) < count,
    )
    for cl in clusters:
        if abs(cl.centre.imag) <= tol:
            cl.centre = complex(cl.centre.real, 0.0)

    degree = minimal_poly_degree(m, rank_tol)
    while _implied_degree(clusters) > degree and len(clusters) > 0:
        _merge_closest(clusters)
    _assign_blocks(clusters, degree)

    clusters.sort(key=lambda c: (-c.centre.real, c.centre.imag))
    spectrum = Spectrum(
        tuple(SpectralComponent(c.centre.real, c.centre.imag, c.block) for c in clusters)
    )
    logger.info(
        "Jordan structure: %s (minimal polynomial degree %d of %d)",
        spectrum.describe(),
        degree,
        d,
    )
    return spectrum


def is_hurwitz(s: Spectrum, margin: float = 0.0) -> bool:
    return all(comp.alpha < -margin for comp in s)


def minimal_poly_degree(m: RealMatrix, rank_tol: float = 1e-8) -> int:
    """Smallest k with {I, m, ..., m^k} (vectorized, column-normalized) rank-deficient."""
    d = m.dim
    a = m.entries
    power = np.eye(d)
    columns = [power.ravel() / math.sqrt(d)]
    for k in range(1, d + 1):
        power = power @ a
        norm = float(np.linalg.norm(power))
        if norm == 0.0 or not math.isfinite(norm):
            return k
        columns.append(power.ravel() / norm)
        sigma = np.linalg.svd(np.column_stack(columns), compute_uv=False)
        if sigma[-1] <= rank_tol * sigma[0]:
            return k
    return d


# ---------------------------------------------------------------------------
# Exponential and trajectories
# ---------------------------------------------------------------------------


def _pade_coefficients(order: int) -> list[float]:
    coeffs = [1.0]
    for k in range(1, order + 1):
        coeffs.append(coeffs[-1] * (order - k + 1) / (k * (2 * order - k + 1)))
    return coeffs


_PADE = _pade_coefficients(_PADE_ORDER)


def _expm(x: NDArray[np.float64]) -> NDArray[np.float64]:
    d = x.shape[0]
    norm = float(np.max(np.sum(np.abs(x), axis=0)))
    squarings = max(0, math.ceil(math.log2(norm / 0.5))) if norm > 0.5 else 0
    x = x / (2.0**squarings)
    numer = _PADE[0] * np.eye(d)
    denom = _PADE[0] * np.eye(d)
    power = np.eye(d)
    for k in range(1, _PADE_ORDER + 1):
        power = power @ x
        numer = numer + _PADE[k] * power
        denom = denom + ((-1) ** k) * _PADE[k] * power
    result = np.linalg.solve(denom, numer)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(squarings):
            result = result @ result
    return np.asarray(result, dtype=np.float64)


def matrix_exponential(m: RealMatrix, t: float) -> RealMatrix:
    """e^{t m} by Pade(6, 6) scaling and squaring."""
    if not math.isfinite(t):
        raise InvalidInputError("t must be finite")
    if t == 0.0:
        return RealMatrix(np.eye(m.dim))
    result = _expm(t * m.entries)
    if not np.all(np.isfinite(result)):
        raise MatrixExponentialOverflowError(f"e^(tA) overflows at t = {t:.6g}")
    return RealMatrix(result)


def sample_trajectory(m: RealMatrix, x0: ArrayLike, times: ArrayLike) -> NDArray[np.float64]:
    """Rows e^{t_j m} x0, stepping with cached exponentials of the increments."""
    x = np.asarray(x0, dtype=np.float64).reshape(-1)
    ts = np.asarray(times, dtype=np.float64).reshape(-1)
    if x.shape[0] != m.dim:
        raise InvalidInputError(f"x0 has length {x.shape[0]}, matrix is {m.dim}x{m.dim}")
    if ts.size and (ts[0] < 0 or np.any(np.diff(ts) < 0)):
        raise InvalidInputError("times must be sorted and nonnegative")
    cache: dict[float, NDArray[np.float64]] = {}
    out = np.empty((ts.size, m.dim))
    prev = 0.0
    for j, t in enumerate(ts):
        dt = float(t) - prev
        if dt > 0.0:
            key = float(f"{dt:.13g}")
            step = cache.get(key)
            if step is None:
                step = matrix_exponential(m, key).entries
                cache[key] = step
            x = step @ x
        out[j] = x
        prev = float(t)
    return out


def realize(s: Spectrum) -> RealMatrix:
    """Block-diagonal real Jordan matrix with spectrum s (dimension dim_pa)."""
    n = s.dim_pa
    a = np.zeros((n, n))
    pos = 0
    for comp in s:
        if comp.is_real:
            for k in range(comp.block):
                a[pos + k, pos + k] = comp.alpha
                if k:
                    a[pos + k - 1, pos + k] = 1.0
            pos += comp.block
            continue
        rot = np.array([[comp.alpha, -comp.beta], [comp.beta, comp.alpha]])
        for k in range(comp.block):
            i = pos + 2 * k
            a[i : i + 2, i : i + 2] = rot
            if k:
                a[i - 2 : i, i : i + 2] = np.eye(2)
        pos += 2 * comp.block
    return RealMatrix(a)
