"""Plot data emission: CSV samples plus a standalone SVG figure."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Literal

import matplotlib
import numpy as np
from matplotlib.figure import Figure
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field

from src.errors import InvalidInputError, PlotRefusedError
from src.models.geometry import PlanarHull

logger = logging.getLogger(__name__)

PlotKind = Literal["hull", "norm"]


class PlotRequest(BaseModel):
    model_config = ConfigDict(frozen=True)

    out_dir: Path
    label: str = Field(pattern=r"^[A-Za-z0-9_.-]+$")
    kind: PlotKind
    t_cut: float = Field(ge=0)


def _save(fig: Figure, path: Path) -> None:
    # fixed salt and no date keep the SVG byte-stable
    with matplotlib.rc_context({"svg.hashsalt": "cuttail"}):
        fig.savefig(path, format="svg", metadata={"Date": None})


def _hull_plot(
    req: PlotRequest,
    times: NDArray[np.float64],
    states: NDArray[np.float64],
    hull: PlanarHull,
    marker: NDArray[np.float64],
) -> list[Path]:
    csv_path = req.out_dir / f"{req.label}-trajectory.csv"
    np.savetxt(
        csv_path,
        np.column_stack((times, states)),
        delimiter=",",
        header="t,x1,x2",
        comments="",
        fmt="%.12g",
    )
    fig = Figure(figsize=(6, 6))
    ax = fig.add_subplot()
    ring = np.vstack((hull.vertices, hull.vertices[:1]))
    ax.plot(ring[:, 0], ring[:, 1], color="C1", linewidth=1.0, label="symmetrized hull")
    ax.plot(states[:, 0], states[:, 1], color="C0", linewidth=1.2, label="x(t)")
    ax.plot(-states[:, 0], -states[:, 1], color="C0", linewidth=0.8, linestyle="--", label="-x(t)")
    ax.plot([marker[0]], [marker[1]], "o", color="C3", label=f"x(T_cut), T_cut = {req.t_cut:.6g}")
    ax.set_aspect("equal")
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.legend(loc="best", fontsize="small")
    svg_path = req.out_dir / f"{req.label}-hull.svg"
    _save(fig, svg_path)
    return [csv_path, svg_path]


def _norm_plot(
    req: PlotRequest, times: NDArray[np.float64], states: NDArray[np.float64]
) -> list[Path]:
    norms = np.linalg.norm(states, axis=1)
    csv_path = req.out_dir / f"{req.label}-norm.csv"
    np.savetxt(
        csv_path,
        np.column_stack((times, norms)),
        delimiter=",",
        header="t,norm",
        comments="",
        fmt="%.12g",
    )
    fig = Figure(figsize=(7, 4))
    ax = fig.add_subplot()
    ax.semilogy(times, norms, color="C0", label="|x(t)|")
    ax.axvline(req.t_cut, color="C3", linestyle="--", label=f"T_cut = {req.t_cut:.6g}")
    ax.set_xlabel("t")
    ax.set_ylabel("|x(t)|")
    ax.legend(loc="best", fontsize="small")
    svg_path = req.out_dir / f"{req.label}-norm.svg"
    _save(fig, svg_path)
    return [csv_path, svg_path]


def emit_plot_data(
    out_dir: Path | str,
    label: str,
    kind: PlotKind,
    times: ArrayLike,
    states: ArrayLike,
    t_cut: float,
    hull: PlanarHull | None = None,
    marker: ArrayLike | None = None,
) -> list[Path]:
    """Write the samples as CSV and draw them as SVG; hull plots exist only in 2D."""
    req = PlotRequest(out_dir=Path(out_dir), label=label, kind=kind, t_cut=t_cut)
    ts = np.asarray(times, dtype=np.float64).reshape(-1)
    xs = np.asarray(states, dtype=np.float64)
    if xs.ndim != 2 or xs.shape[0] != ts.size:
        raise InvalidInputError("states must have one row per sample time")
    req.out_dir.mkdir(parents=True, exist_ok=True)
    if req.kind == "norm":
        paths = _norm_plot(req, ts, xs)
    else:
        if xs.shape[1] != 2:
            raise PlotRefusedError(
                f"hull plots need a planar trajectory, got dimension {xs.shape[1]}"
            )
        if hull is None or marker is None:
            raise InvalidInputError("hull plots need the hull and the x(T_cut) marker")
        paths = _hull_plot(req, ts, xs, hull, np.asarray(marker, dtype=np.float64))
    logger.info("wrote plot data %s", ", ".join(str(p) for p in paths))
    return paths
