"""Tip and shape error metrics with per-condition reporting."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InsufficientDataError
from .reconstruction import DEFAULT_SENSING_LENGTH, PlanarShape

INSTRUMENT_LENGTH = DEFAULT_SENSING_LENGTH  # mm, normalisation length for percentages

#: Published mean errors (mm) and bracketed percentages per condition:
#: label -> (tip, tip %, shape, shape %).
REFERENCE_ERRORS = {
    "R117": (0.97, 2.14, 0.59, 1.31),
    "R50": (0.78, 1.73, 0.67, 1.49),
    "R39": (1.32, 2.92, 0.41, 0.92),
    "Rinf": (0.20, 0.44, 0.07, 0.16),
    "R121": (0.46, 1.02, 0.22, 0.49),
    "R53": (1.12, 2.48, 0.38, 0.85),
    "R46": (1.73, 3.84, 0.44, 0.98),
}


def normalize_error(error: float, instrument_length: float = INSTRUMENT_LENGTH) -> float:
    """Error as a percentage of the instrument length."""
    if not (instrument_length > 0):
        raise DomainError(f"instrument_length must be positive, got {instrument_length}")
    return error / instrument_length * 100.0


@dataclass(frozen=True)
class EvaluationReport:
    label: str
    tip_error: float
    shape_error: float
    tip_error_normalized: float
    shape_error_normalized: float
    instrument_length: float = INSTRUMENT_LENGTH
    trials: int = 1

    def __post_init__(self):
        if self.tip_error < 0 or self.shape_error < 0:
            raise DomainError("errors must be non-negative")

    @classmethod
    def from_errors(cls, label: str, tip: float, shape: float, instrument_length: float = INSTRUMENT_LENGTH,
                    trials: int = 1) -> "EvaluationReport":
        return cls(label, tip, shape, normalize_error(tip, instrument_length),
                   normalize_error(shape, instrument_length), instrument_length, trials)


def resample_by_arclength(shape: PlanarShape, positions) -> np.ndarray:
    """Linearly interpolate ``(x, y)`` at arc positions measured from the shape's start."""
    s = shape.arc_positions - shape.arc_positions[0]
    q = np.asarray(positions, dtype=float).reshape(-1)
    tol = 1e-9 * max(1.0, s[-1])
    if np.any(q < -tol) or np.any(q > s[-1] + tol):
        raise DomainError(f"positions must lie within [0, {s[-1]}] mm")
    q = np.clip(q, 0.0, s[-1])
    return np.column_stack([np.interp(q, s, shape.x), np.interp(q, s, shape.y)])


def tip_error(measured: PlanarShape, truth: PlanarShape) -> float:
    """Euclidean distance between the last points of both shapes (mm)."""
    if len(measured) == 0 or len(truth) == 0:
        raise DomainError("shapes must be non-empty")
    return float(math.hypot(measured.x[-1] - truth.x[-1], measured.y[-1] - truth.y[-1]))


def shape_error(measured: PlanarShape, truth: PlanarShape, n_points: int | None = None,
                window: float | None = None) -> float:
    """Mean point-pair distance over a shared arc-length grid.

    Both shapes are compared from their first point onward over ``window`` mm
    (default: the measured span).  ``n_points`` defaults to the measured
    shape's own gauge count, so the comparison runs on its gauge grid.
    """
    if window is None:
        window = measured.length
    if n_points is None:
        n_points = len(measured)
    if n_points < 2:
        raise InsufficientDataError(f"n_points must be >= 2, got {n_points}")
    tol = 1e-9 * max(1.0, window)
    for name, shp in (("measured", measured), ("truth", truth)):
        if shp.length < window - tol:
            raise DomainError(f"{name} shape spans {shp.length:.6g} mm, shorter than the {window:.6g} mm window")
    grid = np.linspace(0.0, window, n_points)
    d = resample_by_arclength(measured, grid) - resample_by_arclength(truth, grid)
    return float(np.mean(np.hypot(d[:, 0], d[:, 1])))


def aggregate_trials(reports) -> EvaluationReport:
    """Mean absolute errors over repeated trials, re-normalised."""
    reports = list(reports)
    if not reports:
        raise InsufficientDataError("no reports to aggregate")
    labels = {r.label for r in reports}
    if len(labels) != 1:
        raise DomainError(f"cannot aggregate mixed labels {sorted(labels)}")
    lengths = {r.instrument_length for r in reports}
    if len(lengths) != 1:
        raise DomainError("cannot aggregate reports with different instrument lengths")
    if len(reports) == 1:
        return reports[0]
    trials = sum(r.trials for r in reports)
    tip = sum(r.tip_error * r.trials for r in reports) / trials
    shape = sum(r.shape_error * r.trials for r in reports) / trials
    return EvaluationReport.from_errors(reports[0].label, tip, shape, reports[0].instrument_length, trials)


def fit_circle(points) -> tuple[float, float, float]:
    """Algebraic least-squares circle fit; returns ``(cx, cy, radius)``.

    A nearly straight point set yields a very large radius.
    """
    pts = np.asarray(points, dtype=float)
    if pts.shape[0] < 3:
        raise InsufficientDataError("need at least 3 points to fit a circle")
    # centre the data first to keep the normal equations well conditioned
    mean = pts.mean(axis=0)
    p = pts - mean
    design = np.column_stack([2 * p[:, 0], 2 * p[:, 1], np.ones(len(p))])
    rhs = (p**2).sum(axis=1)
    (a, b, c), *_ = np.linalg.lstsq(design, rhs, rcond=None)
    radius = math.sqrt(max(c + a * a + b * b, 0.0))
    return float(a + mean[0]), float(b + mean[1]), radius

