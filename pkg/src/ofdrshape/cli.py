"""Command-line entry point: ``ofdrshape <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 data/domain error, 3 I/O error.
The ``OFDRSHAPE_LOG`` environment variable sets the log level.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import io
from .calibration import PUBLISHED_MODEL, CalibrationModel, fit_calibration, fit_residuals
from .errors import ShapeSensingError
from .metrics import REFERENCE_ERRORS, aggregate_trials
from .pipeline import RunSettings, evaluate_series, reconstruct_series, run_trial, to_trajectory_frame
from .plotting import emit_plots, plot_strain
from .reconstruction import DEFAULT_GAUGE_PITCH, DEFAULT_SENSING_LENGTH, DEFAULT_SMOOTHING_WINDOW, reconstruct_frame
from .replay import ReplayAborted, replay
from .simulator import ComplianceModel, NoiseModel, simulate_jig, simulate_series
from .trajectory import DRILLING_LABELS, FREE_BENDING_LABELS, PRESETS, InsertionSchedule, TrajectorySpec, preset

log = logging.getLogger("ofdrshape")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class RunConfig:
    calibration_path: Path | None = None
    trajectory_path: str | None = None
    frames_path: Path | None = None
    smoothing_window: float = DEFAULT_SMOOTHING_WINDOW
    sensing_length: float = DEFAULT_SENSING_LENGTH
    gauge_pitch: float = DEFAULT_GAUGE_PITCH
    seed: int = 0
    output_dir: Path = Path(".")

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        def path(name):
            v = getattr(args, name, None)
            return Path(v) if v else None

        cfg = cls(
            calibration_path=path("calibration"),
            trajectory_path=getattr(args, "trajectory", None),
            frames_path=path("frames"),
            smoothing_window=getattr(args, "window_mm", DEFAULT_SMOOTHING_WINDOW),
            sensing_length=getattr(args, "sensing_length_mm", DEFAULT_SENSING_LENGTH),
            gauge_pitch=getattr(args, "gauge_pitch_mm", DEFAULT_GAUGE_PITCH),
            seed=getattr(args, "seed", 0),
            output_dir=Path(args.out),
        )
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.smoothing_window < 0:
            raise UsageError("--window-mm must be >= 0")
        if self.sensing_length <= 0:
            raise UsageError("--sensing-length-mm must be positive")
        if self.gauge_pitch <= 0:
            raise UsageError("--gauge-pitch-mm must be positive")
        for p in (self.calibration_path, self.frames_path):
            if p is not None and not p.is_file():
                raise FileNotFoundError(f"no such file: {p}")
        t = self.trajectory_path
        if t is not None and not Path(t).is_file() and t not in PRESETS:
            preset(t)  # raises with the list of known presets


def _load_trajectory(ref: str) -> TrajectorySpec:
    return io.read_trajectory(ref) if Path(ref).is_file() else preset(ref)


def _load_model(path: Path | None) -> CalibrationModel:
    return io.read_model(path) if path else PUBLISHED_MODEL


def _prepare_out(cfg: RunConfig) -> Path:
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    return cfg.output_dir


def cmd_calibrate(args) -> int:
    cfg = RunConfig.from_args(args)
    if cfg.calibration_path is None:
        raise UsageError("calibrate needs --calibration SAMPLES.csv")
    samples = io.read_calibration_samples(cfg.calibration_path)
    model = fit_calibration(samples, args.dead_zone_ue)
    out = _prepare_out(cfg)
    io.write_model(out / "model.json", model)
    lines = ["direction,a,b,rmse_log,rmse_radius_mm,max_abs_error_mm,n"]
    for direction, law in (("pos", model.positive), ("neg", model.negative)):
        pairs = [(s.strain, s.radius) for s in samples if s.direction == direction and not s.straight]
        res = fit_residuals(law, pairs)
        lines.append(",".join([direction, io.fmt(law.a), io.fmt(law.b), io.fmt(res.rmse_log),
                               io.fmt(res.rmse_radius), io.fmt(res.max_abs_error), str(len(pairs))]))
    (out / "residuals.csv").write_text("\n".join(lines) + "\n")
    print(json.dumps(model.to_dict(), sort_keys=True))
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = RunConfig.from_args(args)
    if cfg.trajectory_path is None:
        raise UsageError("simulate needs --trajectory (JSON file or preset label)")
    spec = _load_trajectory(cfg.trajectory_path)
    model = _load_model(cfg.calibration_path)
    sched = InsertionSchedule.for_trajectory(spec, args.increment_mm)
    series = simulate_series(spec, sched, model, ComplianceModel(args.attenuation, args.ramp_mm),
                             NoiseModel(args.sigma_ue, cfg.seed), cfg.sensing_length, cfg.gauge_pitch,
                             args.rigid_mm)
    out = _prepare_out(cfg)
    io.write_frames(out / "frames.csv", series)
    if args.plot:
        plot_strain(series, out / "frames_strain.svg", f"{spec.label}: simulated strain")
    log.info("wrote %d frames to %s", len(series), out / "frames.csv")
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    cfg = RunConfig.from_args(args)
    if cfg.frames_path is None or cfg.calibration_path is None:
        raise UsageError("reconstruct needs --frames and --calibration")
    series = io.read_frames(cfg.frames_path)
    if args.tare_first:
        series = io.tare(series, series.frames[0])
    model = io.read_model(cfg.calibration_path)
    shapes = reconstruct_series(series, model, cfg.smoothing_window, cfg.sensing_length)
    out = _prepare_out(cfg)
    io.write_shape_series(out / "shapes.csv", series.depths, shapes)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    cfg = RunConfig.from_args(args)
    if cfg.trajectory_path is None or not args.shapes:
        raise UsageError("evaluate needs --shapes and --trajectory")
    spec = _load_trajectory(cfg.trajectory_path)
    depths, shapes = io.read_shape_series(args.shapes)
    report = evaluate_series(shapes, depths, spec, args.label)
    out = _prepare_out(cfg)
    io.write_reports(out / "report.csv", [report])
    if cfg.frames_path is not None:
        series = io.read_frames(cfg.frames_path)
        placed = [to_trajectory_frame(sh, spec, d) for sh, d in zip(shapes, depths)]
        emit_plots(series, placed, spec, out, spec.label)
    print(f"{report.label}: tip {report.tip_error:.3f} mm [{report.tip_error_normalized:.2f} %], "
          f"shape {report.shape_error:.3f} mm [{report.shape_error_normalized:.2f} %]")
    return EXIT_OK


def cmd_replay(args) -> int:
    cfg = RunConfig.from_args(args)
    if cfg.frames_path is None:
        raise UsageError("replay needs --frames")
    series = io.read_frames(cfg.frames_path)
    model = io.read_model(cfg.calibration_path) if cfg.calibration_path else None
    out = _prepare_out(cfg)
    tips = []

    def sink(k, depth, prof):
        if model is not None:
            tip = reconstruct_frame(prof, model, cfg.smoothing_window, sensing_length=cfg.sensing_length).tip
            tips.append((k, depth, tip.x, tip.y, tip.theta))

    status = EXIT_OK
    try:
        report = replay(series, args.rate, sink)
    except ReplayAborted as exc:
        print(f"ofdrshape: replay aborted: {exc}", file=sys.stderr)
        report, status = exc.report, EXIT_DATA
    if model is not None:
        lines = ["frame_idx,depth_mm,tip_x_mm,tip_y_mm,tip_theta_rad"]
        lines += [",".join([str(t[0])] + [io.fmt(v) for v in t[1:]]) for t in tips]
        (out / "tips.csv").write_text("\n".join(lines) + "\n")
    (out / "replay_report.json").write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    print(f"emitted {report.emitted} frames, {report.drops} drops, wall time {report.wall_time:.3f} s")
    return status


def cmd_demo(args) -> int:
    """Simulated reproduction of the seven free-bending and drilling conditions."""
    cfg = RunConfig.from_args(args)
    out = _prepare_out(cfg)
    jig = simulate_jig(PUBLISHED_MODEL, trials=3, radius_noise=0.01, seed=cfg.seed)
    io.write_calibration_samples(out / "calibration_samples.csv", jig)
    fitted = fit_calibration(jig)
    io.write_model(out / "model.json", fitted)

    reports = []
    conditions = [(lab, args.sigma_ue) for lab in FREE_BENDING_LABELS]
    conditions += [(lab, args.sigma_ue * args.drilling_noise_factor) for lab in DRILLING_LABELS]
    for ci, (label, sigma) in enumerate(conditions):
        spec = preset(label)
        settings = RunSettings(ComplianceModel(args.attenuation, args.ramp_mm), sigma, cfg.smoothing_window,
                               cfg.sensing_length, cfg.gauge_pitch)
        trials = []
        for t in range(args.trials):
            series, shapes, rep = run_trial(spec, PUBLISHED_MODEL, cfg.seed * 1000 + ci * 10 + t, settings, fitted)
            trials.append(rep)
            if t == 0:
                io.write_frames(out / f"{label}_frames.csv", series)
                io.write_shape_series(out / f"{label}_shapes.csv", series.depths, shapes)
                placed = [to_trajectory_frame(sh, spec, d) for sh, d in zip(shapes, series.depths)]
                emit_plots(series, placed, spec, out, label)
        reports.append(aggregate_trials(trials))
    io.write_reports(out / "report.csv", reports)

    print(f"{'label':<6} {'tip mm [%]':>18} {'shape mm [%]':>18}   published tip / shape")
    for r in reports:
        ref = REFERENCE_ERRORS[r.label]
        print(f"{r.label:<6} {r.tip_error:7.2f} [{r.tip_error_normalized:5.2f} %]  "
              f"{r.shape_error:7.2f} [{r.shape_error_normalized:5.2f} %]   {ref[0]:.2f} / {ref[2]:.2f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ofdrshape", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, *, window=False):
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--sensing-length-mm", type=float, default=DEFAULT_SENSING_LENGTH)
        sp.add_argument("--gauge-pitch-mm", type=float, default=DEFAULT_GAUGE_PITCH)
        if window:
            sp.add_argument("--window-mm", type=float, default=DEFAULT_SMOOTHING_WINDOW,
                            help="strain smoothing window (0 disables)")

    def compliance(sp):
        sp.add_argument("--attenuation", type=float, default=0.65)
        sp.add_argument("--ramp-mm", type=float, default=15.0)
        sp.add_argument("--sigma-ue", type=float, default=20.0, help="gauge noise standard deviation")

    sp = sub.add_parser("calibrate", help="fit the strain/radius power laws from jig samples")
    sp.add_argument("--calibration", help="calibration samples CSV")
    sp.add_argument("--dead-zone-ue", type=float, default=10.0)
    common(sp)
    sp.set_defaults(func=cmd_calibrate)

    sp = sub.add_parser("simulate", help="synthesise a frame series for a trajectory")
    sp.add_argument("--trajectory", help="trajectory JSON or preset label (%s)" % ", ".join(sorted(PRESETS)))
    sp.add_argument("--calibration", help="model JSON (default: published coefficients)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--increment-mm", type=float, default=10.0)
    sp.add_argument("--rigid-mm", type=float, default=0.0, help="rigid proximal section to include")
    sp.add_argument("--plot", action="store_true", help="also write a strain SVG")
    compliance(sp)
    common(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("reconstruct", help="reconstruct shapes from a frame series")
    sp.add_argument("--frames", help="frame series CSV")
    sp.add_argument("--calibration", help="model JSON")
    sp.add_argument("--tare-first", action="store_true", help="subtract the first frame as baseline")
    common(sp, window=True)
    sp.set_defaults(func=cmd_reconstruct)

    sp = sub.add_parser("evaluate", help="tip/shape errors of reconstructed shapes against a trajectory")
    sp.add_argument("--shapes", help="shape series CSV from 'reconstruct'")
    sp.add_argument("--trajectory", help="trajectory JSON or preset label")
    sp.add_argument("--frames", help="frame series CSV; enables SVG figures")
    sp.add_argument("--label", default=None)
    common(sp)
    sp.set_defaults(func=cmd_evaluate)

    sp = sub.add_parser("replay", help="replay frames at a fixed rate")
    sp.add_argument("--frames", help="frame series CSV")
    sp.add_argument("--rate", type=float, default=31.25, help="Hz")
    sp.add_argument("--calibration", help="model JSON; reconstruct each frame as it arrives")
    common(sp, window=True)
    sp.set_defaults(func=cmd_replay)

    sp = sub.add_parser("demo", help="end-to-end simulated reproduction of all seven conditions")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trials", type=int, default=3)
    sp.add_argument("--drilling-noise-factor", type=float, default=2.0)
    compliance(sp)
    common(sp, window=True)
    sp.set_defaults(func=cmd_demo)
    return p


def main(argv=None) -> int:
    level = os.environ.get("OFDRSHAPE_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"ofdrshape: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"ofdrshape: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ShapeSensingError, ValueError) as exc:
        print(f"ofdrshape: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
