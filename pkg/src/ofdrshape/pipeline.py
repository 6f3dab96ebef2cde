"""Frame-series level glue: reconstruct, register against ground truth, evaluate."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .calibration import CalibrationModel
from .metrics import INSTRUMENT_LENGTH, EvaluationReport, aggregate_trials, shape_error, tip_error
from .reconstruction import DEFAULT_SENSING_LENGTH, DEFAULT_SMOOTHING_WINDOW, PlanarShape, Pose2D, reconstruct_frame
from .simulator import ComplianceModel, FrameSeries, NoiseModel, simulate_series
from .trajectory import InsertionSchedule, TrajectorySpec

log = logging.getLogger(__name__)


def reconstruct_series(series: FrameSeries, model: CalibrationModel, window: float = DEFAULT_SMOOTHING_WINDOW,
                       sensing_length: float | None = DEFAULT_SENSING_LENGTH,
                       start: Pose2D = Pose2D()) -> list[PlanarShape]:
    return [reconstruct_frame(f, model, window, start, sensing_length) for f in series.frames]


def truth_for(shape: PlanarShape, spec: TrajectorySpec, depth: float) -> PlanarShape:
    """Ground truth under ``shape``, registered to the shape's base pose.

    The distal gauge sits at ``depth`` along the trajectory.  The truth is
    moved rigidly so its proximal pose coincides with the measured one: both
    shapes share the base frame where the fiber is held fixed.
    """
    s = shape.arc_positions
    positions = depth - (s[-1] - s)
    x, y, th = spec.poses_at(positions)
    truth = PlanarShape(x, y, th, positions)
    to_local = truth.base.inverse()
    base = shape.base
    local = truth.transformed(to_local)
    return local.transformed(base)


def to_trajectory_frame(shape: PlanarShape, spec: TrajectorySpec, depth: float) -> PlanarShape:
    """Move a reconstructed window so its base sits on the trajectory (for plotting)."""
    s = shape.arc_positions
    x, y, th = spec.poses_at([depth - (s[-1] - s[0])])
    anchor = Pose2D(float(x[0]), float(y[0]), float(th[0]))
    return shape.transformed(shape.base.inverse()).transformed(anchor)


def evaluate_frame(shape: PlanarShape, spec: TrajectorySpec, depth: float) -> tuple[float, float]:
    truth = truth_for(shape, spec, depth)
    return tip_error(shape, truth), shape_error(shape, truth)


def evaluate_series(shapes, depths, spec: TrajectorySpec, label: str | None = None,
                    instrument_length: float = INSTRUMENT_LENGTH) -> EvaluationReport:
    """Errors averaged over every recorded insertion increment of one trial."""
    errs = np.array([evaluate_frame(sh, spec, float(d)) for sh, d in zip(shapes, depths)])
    if errs.size == 0:
        raise ValueError("no frames to evaluate")
    tip, shp = errs.mean(axis=0)
    return EvaluationReport.from_errors(label or spec.label, float(tip), float(shp), instrument_length)


@dataclass(frozen=True)
class RunSettings:
    compliance: ComplianceModel = ComplianceModel()
    sigma: float = 20.0
    window: float = DEFAULT_SMOOTHING_WINDOW
    sensing_length: float = DEFAULT_SENSING_LENGTH
    gauge_pitch: float = 0.65
    increment: float = 10.0
    rigid_length: float = 0.0


def run_trial(spec: TrajectorySpec, model: CalibrationModel, seed: int, settings: RunSettings = RunSettings(),
              reconstruct_model: CalibrationModel | None = None):
    """Simulate one insertion run and evaluate its reconstruction.

    ``reconstruct_model`` lets the reconstruction use a fitted calibration
    different from the one that generated the data.
    """
    sched = InsertionSchedule.for_trajectory(spec, settings.increment)
    series = simulate_series(spec, sched, model, settings.compliance, NoiseModel(settings.sigma, seed),
                             settings.sensing_length, settings.gauge_pitch, settings.rigid_length)
    shapes = reconstruct_series(series, reconstruct_model or model, settings.window, settings.sensing_length)
    report = evaluate_series(shapes, series.depths, spec)
    log.debug("%s seed=%d tip=%.3f shape=%.3f", spec.label, seed, report.tip_error, report.shape_error)
    return series, shapes, report


def run_condition(spec: TrajectorySpec, model: CalibrationModel, seeds, settings: RunSettings = RunSettings(),
                  reconstruct_model: CalibrationModel | None = None) -> EvaluationReport:
    reports = [run_trial(spec, model, s, settings, reconstruct_model)[2] for s in seeds]
    return aggregate_trials(reports)
