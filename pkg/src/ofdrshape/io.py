"""CSV/JSON persistence for every artifact the pipeline reads or writes, plus taring.

Floats are written with 12 significant digits; infinite radii are spelled ``inf``.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .calibration import CalibrationModel, CalibrationSample
from .errors import DomainError, FormatError
from .metrics import EvaluationReport
from .reconstruction import PlanarShape, StrainProfile
from .simulator import INTERROGATOR_RATE, FrameSeries
from .trajectory import TrajectorySpec

CALIBRATION_HEADER = ["radius_mm", "direction", "strain_ue", "trial"]
FRAME_HEADER = ["frame_idx", "depth_mm", "s_mm", "strain_ue"]
SHAPE_HEADER = ["s_mm", "x_mm", "y_mm", "theta_rad"]
SHAPE_SERIES_HEADER = ["frame_idx", "depth_mm"] + SHAPE_HEADER
REPORT_HEADER = ["label", "tip_mm", "tip_pct", "shape_mm", "shape_pct", "trials"]


def fmt(value: float) -> str:
    return f"{float(value):.12g}"


def _read_rows(path, header: list[str]) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [h.strip() for h in reader.fieldnames] != header:
            raise FormatError(f"{path}: expected header {','.join(header)}, got {reader.fieldnames}")
        return list(reader)


def _float(row: dict, key: str, path, line: int) -> float:
    try:
        return float(row[key])
    except (TypeError, ValueError):
        raise FormatError(f"{path}:{line}: bad {key} value {row[key]!r}") from None


def _write_json(path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _read_json(path) -> dict:
    with open(path) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: invalid JSON ({exc})") from exc


# calibration samples and models

def write_calibration_samples(path, samples) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CALIBRATION_HEADER)
        for s in samples:
            w.writerow([fmt(s.radius), s.direction, fmt(s.strain), s.trial])


def read_calibration_samples(path) -> list[CalibrationSample]:
    out = []
    for line, row in enumerate(_read_rows(path, CALIBRATION_HEADER), start=2):
        try:
            out.append(CalibrationSample(
                _float(row, "radius_mm", path, line), row["direction"].strip(),
                _float(row, "strain_ue", path, line), int(row["trial"]),
            ))
        except ValueError as exc:
            raise FormatError(f"{path}:{line}: {exc}") from exc
    return out


def write_model(path, model: CalibrationModel) -> None:
    _write_json(path, model.to_dict())


def read_model(path) -> CalibrationModel:
    return CalibrationModel.from_dict(_read_json(path))


def write_trajectory(path, spec: TrajectorySpec) -> None:
    _write_json(path, spec.to_dict())


def read_trajectory(path) -> TrajectorySpec:
    return TrajectorySpec.from_dict(_read_json(path))


# frame series

def sidecar_path(path) -> Path:
    p = Path(path)
    return p.with_name(p.stem + ".meta.json")


def write_frames(path, series: FrameSeries) -> None:
    """Write one row per (frame, gauge) plus a JSON sidecar with the metadata."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(FRAME_HEADER)
        for i, (depth, prof) in enumerate(series):
            for s, eps in zip(prof.positions, prof.samples):
                w.writerow([i, fmt(depth), fmt(s), fmt(eps)])
    meta = dict(series.metadata)
    meta.update(rate_hz=series.rate, gauge_pitch_mm=series.gauge_pitch if len(series) else None,
                n_frames=len(series))
    _write_json(sidecar_path(path), meta)


def read_frames(path) -> FrameSeries:
    rows = _read_rows(path, FRAME_HEADER)
    meta_path = sidecar_path(path)
    meta = _read_json(meta_path) if meta_path.exists() else {}
    grouped: dict[int, list] = {}
    depth_of: dict[int, float] = {}
    for line, row in enumerate(rows, start=2):
        try:
            idx = int(row["frame_idx"])
        except ValueError:
            raise FormatError(f"{path}:{line}: bad frame_idx {row['frame_idx']!r}") from None
        grouped.setdefault(idx, []).append((_float(row, "s_mm", path, line), _float(row, "strain_ue", path, line)))
        depth_of[idx] = _float(row, "depth_mm", path, line)
    if not grouped:
        raise FormatError(f"{path}: no frames")
    rate = float(meta.get("rate_hz", INTERROGATOR_RATE))
    frames = []
    for k, idx in enumerate(sorted(grouped)):
        pts = sorted(grouped[idx])
        s = np.array([p[0] for p in pts])
        pitch = meta.get("gauge_pitch_mm")
        if pitch is None:
            if s.size < 2:
                raise FormatError(f"{path}: cannot infer gauge pitch from a single gauge")
            pitch = float(np.median(np.diff(s)))
        if s.size > 1 and not np.allclose(np.diff(s), pitch, rtol=1e-6, atol=1e-9):
            raise FormatError(f"{path}: frame {idx} gauges are not uniformly spaced at {pitch} mm")
        frames.append(StrainProfile([p[1] for p in pts], float(pitch), float(s[0]), timestamp=k / rate))
    depths = [depth_of[i] for i in sorted(grouped)]
    meta = {k: v for k, v in meta.items() if k not in ("rate_hz", "gauge_pitch_mm", "n_frames")}
    return FrameSeries(depths, tuple(frames), rate, meta)


def tare(frames: FrameSeries, baseline: StrainProfile) -> FrameSeries:
    """Subtract an unloaded baseline frame from every frame."""
    for i, f in enumerate(frames.frames):
        if (len(f) != len(baseline) or not math.isclose(f.gauge_pitch, baseline.gauge_pitch)
                or not math.isclose(f.origin_offset, baseline.origin_offset, abs_tol=1e-9)):
            raise DomainError(f"baseline gauge grid does not match frame {i}")
    tared = tuple(f.with_samples(f.samples - baseline.samples) for f in frames.frames)
    return FrameSeries(frames.depths, tared, frames.rate, dict(frames.metadata))


# shapes

def write_shape(path, shape: PlanarShape) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SHAPE_HEADER)
        for row in zip(shape.arc_positions, shape.x, shape.y, shape.theta):
            w.writerow([fmt(v) for v in row])


def read_shape(path) -> PlanarShape:
    rows = _read_rows(path, SHAPE_HEADER)
    if not rows:
        raise FormatError(f"{path}: empty shape")
    cols = {k: [_float(r, k, path, i) for i, r in enumerate(rows, start=2)] for k in SHAPE_HEADER}
    return PlanarShape(cols["x_mm"], cols["y_mm"], cols["theta_rad"], cols["s_mm"])


def write_shape_series(path, depths, shapes) -> None:
    """Shapes of several frames in one file, keyed by frame index and depth."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SHAPE_SERIES_HEADER)
        for i, (depth, shape) in enumerate(zip(depths, shapes)):
            for row in zip(shape.arc_positions, shape.x, shape.y, shape.theta):
                w.writerow([i, fmt(depth)] + [fmt(v) for v in row])


def read_shape_series(path) -> tuple[list[float], list[PlanarShape]]:
    rows = _read_rows(path, SHAPE_SERIES_HEADER)
    grouped: dict[int, list] = {}
    depth_of: dict[int, float] = {}
    for line, row in enumerate(rows, start=2):
        idx = int(row["frame_idx"])
        depth_of[idx] = _float(row, "depth_mm", path, line)
        grouped.setdefault(idx, []).append([_float(row, k, path, line) for k in SHAPE_HEADER])
    if not grouped:
        raise FormatError(f"{path}: no shapes")
    depths, shapes = [], []
    for idx in sorted(grouped):
        arr = np.array(sorted(grouped[idx]))
        depths.append(depth_of[idx])
        shapes.append(PlanarShape(arr[:, 1], arr[:, 2], arr[:, 3], arr[:, 0]))
    return depths, shapes


# reports

def write_reports(path, reports) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REPORT_HEADER)
        for r in reports:
            w.writerow([r.label, fmt(r.tip_error), fmt(r.tip_error_normalized), fmt(r.shape_error),
                        fmt(r.shape_error_normalized), r.trials])


def read_reports(path, instrument_length: float = 45.0) -> list[EvaluationReport]:
    out = []
    for line, row in enumerate(_read_rows(path, REPORT_HEADER), start=2):
        out.append(EvaluationReport(
            row["label"], _float(row, "tip_mm", path, line), _float(row, "shape_mm", path, line),
            _float(row, "tip_pct", path, line), _float(row, "shape_pct", path, line),
            instrument_length, int(row["trials"]),
        ))
    return out
