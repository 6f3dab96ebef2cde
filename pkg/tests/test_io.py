import json
import math

import numpy as np
import pytest

from ofdrshape import io
from ofdrshape.calibration import PUBLISHED_MODEL
from ofdrshape.errors import DomainError, FormatError
from ofdrshape.metrics import EvaluationReport
from ofdrshape.pipeline import reconstruct_series
from ofdrshape.reconstruction import StrainProfile
from ofdrshape.simulator import FrameSeries, NoiseModel, simulate_jig, simulate_series
from ofdrshape.trajectory import InsertionSchedule, preset


@pytest.fixture
def series(model):
    spec = preset("R53")
    return simulate_series(spec, InsertionSchedule.for_trajectory(spec), model, noise=NoiseModel(20.0, 9),
                           rigid_length=5.0)


def test_calibration_samples_round_trip(tmp_path, model):
    samples = simulate_jig(model, trials=2, radius_noise=0.01, seed=3)
    path = tmp_path / "jig.csv"
    io.write_calibration_samples(path, samples)
    assert path.read_text().splitlines()[0] == "radius_mm,direction,strain_ue,trial"
    assert "inf,pos" in path.read_text()
    back = io.read_calibration_samples(path)
    assert len(back) == len(samples)
    for a, b in zip(samples, back):
        assert a.direction == b.direction and a.trial == b.trial
        assert b.radius == pytest.approx(a.radius, rel=1e-9) or math.isinf(a.radius)
        assert b.strain == pytest.approx(a.strain, rel=1e-9, abs=1e-12)


def test_model_json(tmp_path):
    path = tmp_path / "model.json"
    io.write_model(path, PUBLISHED_MODEL)
    raw = json.loads(path.read_text())
    assert raw == {"positive": {"a": 284000.0, "b": -1.08}, "negative": {"a": 150000.0, "b": -0.999},
                   "dead_zone_ue": 10.0}
    assert io.read_model(path) == PUBLISHED_MODEL


def test_trajectory_json(tmp_path):
    path = tmp_path / "traj.json"
    io.write_trajectory(path, preset("R121"))
    raw = json.loads(path.read_text())
    assert raw["label"] == "R121"
    assert raw["segments"][1] == {"kind": "arc", "length_mm": 50.0, "radius_mm": 121.0}
    assert io.read_trajectory(path) == preset("R121")


def test_frames_round_trip(tmp_path, series):
    path = tmp_path / "frames.csv"
    io.write_frames(path, series)
    assert path.read_text().splitlines()[0] == "frame_idx,depth_mm,s_mm,strain_ue"
    meta = json.loads(io.sidecar_path(path).read_text())
    assert meta["rate_hz"] == 31.25 and meta["gauge_pitch_mm"] == 0.65 and meta["seed"] == 9
    back = io.read_frames(path)
    assert len(back) == len(series)
    np.testing.assert_allclose(back.depths, series.depths, rtol=1e-9)
    np.testing.assert_allclose(back.strain_matrix(), series.strain_matrix(), rtol=1e-9, atol=1e-9)
    assert back.frames[0].origin_offset == pytest.approx(series.frames[0].origin_offset, abs=1e-9)


def test_frames_without_sidecar(tmp_path):
    path = tmp_path / "f.csv"
    path.write_text("frame_idx,depth_mm,s_mm,strain_ue\n0,10,0,1\n0,10,0.65,2\n0,10,1.3,3\n")
    back = io.read_frames(path)
    assert back.gauge_pitch == pytest.approx(0.65)
    assert list(back.frames[0].samples) == [1.0, 2.0, 3.0]


def test_bad_header(tmp_path):
    path = tmp_path / "f.csv"
    path.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(FormatError):
        io.read_frames(path)


def test_bad_value(tmp_path):
    path = tmp_path / "jig.csv"
    path.write_text("radius_mm,direction,strain_ue,trial\n35,pos,abc,0\n")
    with pytest.raises(FormatError, match=":2"):
        io.read_calibration_samples(path)


def test_shapes_round_trip(tmp_path, series, model):
    shapes = reconstruct_series(series, model)
    path = tmp_path / "shapes.csv"
    io.write_shape_series(path, series.depths, shapes)
    depths, back = io.read_shape_series(path)
    np.testing.assert_allclose(depths, series.depths)
    for a, b in zip(shapes, back):
        for attr in ("x", "y", "theta", "arc_positions"):
            np.testing.assert_allclose(getattr(b, attr), getattr(a, attr), rtol=1e-9, atol=1e-9)

    single = tmp_path / "shape.csv"
    io.write_shape(single, shapes[-1])
    assert single.read_text().splitlines()[0] == "s_mm,x_mm,y_mm,theta_rad"
    np.testing.assert_allclose(io.read_shape(single).points, shapes[-1].points, rtol=1e-9, atol=1e-9)


def test_reports_round_trip(tmp_path):
    reps = [EvaluationReport.from_errors("R46", 1.73, 0.44, trials=3),
            EvaluationReport.from_errors("Rinf", 0.2, 0.07, trials=3)]
    path = tmp_path / "report.csv"
    io.write_reports(path, reps)
    assert path.read_text().splitlines()[0] == "label,tip_mm,tip_pct,shape_mm,shape_pct,trials"
    back = io.read_reports(path)
    for a, b in zip(reps, back):
        assert b.label == a.label and b.trials == a.trials
        assert b.tip_error_normalized == pytest.approx(a.tip_error_normalized, rel=1e-9)


class TestTare:
    def test_first_frame_baseline(self, series):
        out = io.tare(series, series.frames[0])
        assert np.all(out.frames[0].samples == 0.0)

    def test_zero_baseline(self, series):
        out = io.tare(series, series.frames[0].with_samples(np.zeros(len(series.frames[0]))))
        np.testing.assert_array_equal(out.strain_matrix(), series.strain_matrix())

    def test_constant_offset(self):
        frames = FrameSeries([10.0, 20.0], (StrainProfile(np.full(8, 3770.0)),) * 2)
        out = io.tare(frames, StrainProfile(np.full(8, 50.0)))
        np.testing.assert_allclose(out.strain_matrix(), 3720.0)

    def test_grid_mismatch(self, series):
        with pytest.raises(DomainError):
            io.tare(series, StrainProfile(np.zeros(3)))
