"""SVG figures: strain along the fiber and measured-vs-expected shape overlays.

Figures are built on bare ``Figure`` objects (no pyplot state) and written
with a fixed hash salt and no date stamp, so identical inputs give
byte-identical files.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import numpy as np
from matplotlib import rc_context
from matplotlib.figure import Figure

from .errors import DomainError
from .reconstruction import PlanarShape
from .simulator import FrameSeries
from .trajectory import TrajectorySpec, centerline

TUBE_INNER_DIAMETER = 3.1  # mm

_RC = {
    "svg.hashsalt": "ofdrshape",
    "svg.fonttype": "path",
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def _save(fig: Figure, path) -> Path:
    path = Path(path)
    with rc_context(_RC):
        fig.savefig(path, format="svg", metadata={"Date": None})
    return path


def _new_figure(width=5.0, height=3.2) -> Figure:
    with rc_context(_RC):
        fig = Figure(figsize=(width, height))
        fig.add_subplot()
    return fig


def plot_strain(series: FrameSeries, path, title: str = "") -> Path:
    """Strain against arc length, one curve per recorded depth."""
    if len(series) == 0:
        raise DomainError("no frames to plot")
    with rc_context(_RC):
        fig = _new_figure()
        ax = fig.axes[0]
        colors = matplotlib.colormaps["viridis"](np.linspace(0.0, 0.9, len(series)))
        for (depth, prof), color in zip(series, colors):
            ax.plot(prof.positions, prof.samples, color=color, lw=1.0, label=f"{depth:g} mm")
        first = series.frames[0]
        if first.origin_offset < 0:
            ax.axvspan(first.origin_offset, 0.0, color="0.85", lw=0, label="rigid section")
        ax.set_xlabel("arc length (mm)")
        ax.set_ylabel("strain (µε)")
        if title:
            ax.set_title(title)
        ax.legend(fontsize=7, ncol=2, frameon=False)
        fig.tight_layout()
    return _save(fig, path)


def _offset(shape: PlanarShape, d: float) -> tuple[np.ndarray, np.ndarray]:
    return shape.x - d * np.sin(shape.theta), shape.y + d * np.cos(shape.theta)


def plot_shapes(shapes, spec: TrajectorySpec, path, title: str = "",
                tube_inner_diameter: float = TUBE_INNER_DIAMETER) -> Path:
    """Measured shapes over the expected midline and the tube lumen walls.

    ``shapes`` must already be expressed in the trajectory frame.
    """
    shapes = list(shapes)
    if not shapes:
        raise DomainError("no shapes to plot")
    mid = centerline(spec, 0.25)
    with rc_context(_RC):
        fig = _new_figure(5.0, 4.0)
        ax = fig.axes[0]
        for sign in (-1, 1):
            ax.plot(*_offset(mid, sign * tube_inner_diameter / 2), color="0.6", lw=0.8,
                    label="tube wall" if sign < 0 else None)
        ax.plot(mid.x, mid.y, "--", color="tab:orange", lw=1.2, label="expected midline")
        for i, sh in enumerate(shapes):
            ax.plot(sh.x, sh.y, color="tab:blue", lw=1.0, alpha=0.35 + 0.65 * (i + 1) / len(shapes),
                    label="measured" if i == len(shapes) - 1 else None)
        ax.set_aspect("equal", adjustable="datalim")
        ax.set_xlabel("x (mm)")
        ax.set_ylabel("y (mm)")
        if title:
            ax.set_title(title)
        ax.legend(fontsize=7, frameon=False)
        fig.tight_layout()
    return _save(fig, path)


def emit_plots(series: FrameSeries, shapes, spec: TrajectorySpec, out_dir, stem: str) -> list[Path]:
    """Write ``<stem>_strain.svg`` and ``<stem>_shape.svg`` into ``out_dir``."""
    if len(series) == 0:
        raise DomainError("no frames to plot")
    out_dir = Path(out_dir)
    return [
        plot_strain(series, out_dir / f"{stem}_strain.svg", f"{spec.label}: strain along the fiber"),
        plot_shapes(shapes, spec, out_dir / f"{stem}_shape.svg", f"{spec.label}: reconstructed shape"),
    ]
