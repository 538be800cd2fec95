"""Brute-force planar oracle: sampled trajectory, symmetrized hull, interiority scan."""

from __future__ import annotations

import logging
import math

import numpy as np
from numpy.typing import ArrayLike, NDArray

from src.errors import (
    DegenerateHullError,
    HorizonTooShortError,
    InvalidInputError,
    NotHurwitzError,
)
from src.models.geometry import Interiority, PlanarHull
from src.models.spectrum import Spectrum
from src.services.spectra import is_hurwitz

logger = logging.getLogger(__name__)

DECAY_REQUIRED = 1e-4
SCAN_MARGIN = 1e-9
_CHUNK = 256


def _cross(o: NDArray[np.float64], a: NDArray[np.float64], b: NDArray[np.float64]) -> float:
    return float((a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]))


def symmetrized_hull(points: ArrayLike, dup_tol: float = 1e-12) -> PlanarHull:
    """Convex hull of points and their negations (monotone chain, lower half mirrored)."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if not np.all(np.isfinite(pts)):
        raise InvalidInputError("hull points must be finite")
    both = np.vstack((pts, -pts))
    both = both[np.lexsort((both[:, 1], both[:, 0]))]
    scale = float(np.max(np.abs(both))) if both.size else 0.0
    if scale == 0.0:
        raise DegenerateHullError("all points are at the origin")
    keep = np.ones(len(both), dtype=bool)
    keep[1:] = np.any(np.abs(np.diff(both, axis=0)) > dup_tol * scale, axis=1)
    both = both[keep]

    turn_tol = 1e-14 * scale * scale
    lower: list[NDArray[np.float64]] = []
    for p in both:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= turn_tol:
            lower.pop()
        lower.append(p)
    half = lower[:-1]
    if len(half) < 2:
        raise DegenerateHullError("points are collinear with their negations")
    vertices = np.array(half + [-v for v in half])
    return PlanarHull(vertices, symmetric=True)


def signed_distances(hull: PlanarHull, queries: ArrayLike) -> NDArray[np.float64]:
    """Minimum signed distance of each query to the hull edges (positive inside)."""
    q = np.asarray(queries, dtype=np.float64).reshape(-1, 2)
    start, vec = hull.edges
    length = np.hypot(vec[:, 0], vec[:, 1])
    out = np.empty(q.shape[0])
    for lo in range(0, q.shape[0], _CHUNK):
        block = q[lo : lo + _CHUNK]
        dx = block[:, None, 0] - start[None, :, 0]
        dy = block[:, None, 1] - start[None, :, 1]
        cross = vec[None, :, 0] * dy - vec[None, :, 1] * dx
        out[lo : lo + _CHUNK] = np.min(cross / length[None, :], axis=1)
    return out


def _classify(distance: float, margin: float) -> Interiority:
    if distance > margin:
        return Interiority.INTERIOR
    if distance >= -margin:
        return Interiority.BOUNDARY
    return Interiority.EXTERIOR


def interiority(hull: PlanarHull, q: ArrayLike, margin: float | None = None) -> Interiority:
    """Classify q by its signed edge distance; margin defaults to 1e-3 of the diameter."""
    tol = 1e-3 * hull.diameter if margin is None else margin
    return _classify(float(signed_distances(hull, q)[0]), tol)


def hull_contains(outer: PlanarHull, inner: PlanarHull, tol: float = 1e-12) -> bool:
    """True when every vertex of inner lies in outer up to tol times its diameter."""
    margin = tol * outer.diameter
    return bool(np.all(signed_distances(outer, inner.vertices) >= -margin))


def canonical_trajectory(s: Spectrum, times: ArrayLike) -> NDArray[np.float64]:
    """Generic trajectory of the real Jordan form of a 2D spectrum."""
    t = np.asarray(times, dtype=np.float64).reshape(-1)
    if s.dim_pa != 2:
        raise InvalidInputError(f"geometric oracle needs dim P_A = 2, got {s.dim_pa}")
    comps = s.components
    if len(comps) == 2:
        return np.column_stack((np.exp(comps[0].alpha * t), np.exp(comps[1].alpha * t)))
    comp = comps[0]
    decay = np.exp(comp.alpha * t)
    if comp.is_real:
        return np.column_stack((t * decay, decay))
    return np.column_stack((decay * np.cos(comp.beta * t), decay * np.sin(comp.beta * t)))


def default_horizon(s: Spectrum) -> float:
    jordan = any(c.block > 1 for c in s)
    return (24.0 if jordan else 12.0) / s.slowest_decay


def scan_boundary(
    s: Spectrum, start: float, stop: float, samples: int
) -> tuple[NDArray[np.float64], list[Interiority], PlanarHull]:
    """Classify every sample of the arc [start, stop] against the hull of the arc."""
    times = np.linspace(start, stop, samples)
    traj = canonical_trajectory(s, times)
    hull = symmetrized_hull(traj)
    margin = SCAN_MARGIN * hull.diameter
    labels = [_classify(d, margin) for d in signed_distances(hull, traj).tolist()]
    return times, labels, hull


def _last_boundary(times: NDArray[np.float64], labels: list[Interiority]) -> float:
    idx = [i for i, lab in enumerate(labels) if lab is Interiority.BOUNDARY]
    return float(times[idx[-1]]) if idx else 0.0


def cut_tail_geometric(
    s: Spectrum, horizon: float | None = None, samples: int = 4000
) -> float:
    """Largest sampled t where x(t) is still on the hull boundary, refined once."""
    if not is_hurwitz(s):
        raise NotHurwitzError(f"spectrum {s.describe()} is not Hurwitz")
    if samples < 16:
        raise InvalidInputError("need at least 16 samples")
    h = default_horizon(s) if horizon is None else float(horizon)
    if not (math.isfinite(h) and h > 0):
        raise InvalidInputError("horizon must be finite and > 0")
    ends = canonical_trajectory(s, [0.0, h])
    ratio = float(np.linalg.norm(ends[1]) / np.linalg.norm(ends[0]))
    if ratio > DECAY_REQUIRED:
        raise HorizonTooShortError(
            f"trajectory norm at horizon {h:.6g} is {ratio:.3g} of the initial norm; "
            f"use a horizon of at least {default_horizon(s):.6g}"
        )

    times, labels, _ = scan_boundary(s, 0.0, h, samples)
    coarse = _last_boundary(times, labels)
    step = h / (samples - 1)
    window = min(h, coarse + 2.0 * step)
    times, labels, _ = scan_boundary(s, 0.0, window, samples)
    refined = _last_boundary(times, labels)
    logger.info("geometric cut-tail %.6g (coarse %.6g, step %.3g)", refined, coarse, step)
    return refined
