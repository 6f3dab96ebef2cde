import numpy as np
import pytest

from ofdrshape.errors import DomainError, InsufficientDataError
from ofdrshape.metrics import (
    REFERENCE_ERRORS,
    EvaluationReport,
    aggregate_trials,
    fit_circle,
    normalize_error,
    resample_by_arclength,
    shape_error,
    tip_error,
)
from ofdrshape.reconstruction import PlanarShape
from ofdrshape.trajectory import Segment, TrajectorySpec, centerline


def straight(length, step=0.65, offset=(0.0, 0.0)):
    s = np.append(np.arange(0.0, length, step), length)
    return PlanarShape(s + offset[0], np.full_like(s, offset[1]), np.zeros_like(s), s)


def arc(radius, length, step=0.65):
    return centerline(TrajectorySpec((Segment("arc", length, radius),)), step)


class TestResample:
    def test_midpoint_of_straight(self):
        np.testing.assert_allclose(resample_by_arclength(straight(45.0), [22.5]), [[22.5, 0.0]])

    def test_grid_positions_exact(self):
        shape = arc(50.0, 50.0)
        pts = resample_by_arclength(shape, shape.arc_positions)
        np.testing.assert_array_equal(pts, shape.points)

    def test_arc_quarter(self):
        # analytic (50 sin 0.5, 50 (1 - cos 0.5)); linear interpolation between
        # samples 0.65 mm apart deviates by at most the sagitta (~1e-3 mm)
        pt = resample_by_arclength(arc(50.0, 50.0), [25.0])[0]
        assert pt == pytest.approx([23.971276930210150, 6.120871905481364], abs=2e-3)

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            resample_by_arclength(straight(10.0), [10.5])
        with pytest.raises(DomainError):
            resample_by_arclength(straight(10.0), [-0.1])


class TestTipError:
    def test_identical(self):
        a = arc(50.0, 50.0)
        assert tip_error(a, a) == 0.0

    def test_three_four_five(self):
        a = straight(10.0)
        b = straight(10.0, offset=(3.0, 4.0))
        assert tip_error(a, b) == pytest.approx(5.0, abs=1e-12)

    def test_arc_vs_straight(self):
        # ||(50 sin 1, 50 (1 - cos 1)) - (50, 0)||, mpmath
        assert tip_error(arc(50.0, 50.0), straight(50.0)) == pytest.approx(24.313238094088144, abs=1e-10)


class TestShapeError:
    def test_identical(self):
        a = arc(80.0, 45.0)
        assert shape_error(a, a) == 0.0

    def test_lateral_offset(self):
        assert shape_error(straight(45.0), straight(45.0, offset=(0.0, 0.5))) == pytest.approx(0.5, abs=1e-12)

    def test_straight_vs_gentle_arc_five_points(self):
        # brute force over the five pairs at u = 0, 2.5, ..., 10 (mpmath)
        got = shape_error(straight(10.0, step=0.01), arc(100.0, 10.0, step=0.01), n_points=5)
        assert got == pytest.approx(0.18746159222623292, abs=1e-5)

    def test_span_mismatch_names_shorter(self):
        with pytest.raises(DomainError, match="truth"):
            shape_error(straight(45.0), straight(30.0))

    def test_too_few_points(self):
        with pytest.raises(InsufficientDataError):
            shape_error(straight(10.0), straight(10.0), n_points=1)


def test_metric_properties_randomised(rng):
    for _ in range(500):
        n = int(rng.integers(2, 40))
        s = np.arange(n) * 0.65
        a = PlanarShape(rng.normal(0, 10, n), rng.normal(0, 10, n), np.zeros(n), s)
        b = PlanarShape(rng.normal(0, 10, n), rng.normal(0, 10, n), np.zeros(n), s)
        d = np.hypot(a.x - b.x, a.y - b.y)
        e_ab, e_ba = shape_error(a, b), shape_error(b, a)
        assert e_ab >= 0 and e_ab == pytest.approx(e_ba, rel=1e-12)
        assert e_ab <= d.max() + 1e-12
        assert tip_error(a, b) == tip_error(b, a) >= 0
        assert shape_error(a, a) == 0.0


def test_translation_increases_errors():
    a = arc(50.0, 45.0)
    moved = PlanarShape(a.x + 1.0, a.y, a.theta, a.arc_positions)
    assert tip_error(moved, a) == pytest.approx(1.0)
    assert shape_error(moved, a) == pytest.approx(1.0)


class TestNormalize:
    @pytest.mark.parametrize("error,pct", [(1.73, 3.84), (0.46, 1.02)])
    def test_published_rows(self, error, pct):
        assert normalize_error(error, 45.0) == pytest.approx(pct, abs=5e-3)

    def test_zero(self):
        assert normalize_error(0.0, 12.0) == 0.0

    def test_bad_length(self):
        with pytest.raises(DomainError):
            normalize_error(1.0, 0.0)


def test_reference_table_consistent():
    for label, (tip, tip_pct, shp, shp_pct) in REFERENCE_ERRORS.items():
        assert abs(normalize_error(tip) - tip_pct) <= 0.05, label
        assert abs(normalize_error(shp) - shp_pct) <= 0.05, label


class TestAggregate:
    def test_single(self):
        r = EvaluationReport.from_errors("R50", 1.0, 0.3)
        assert aggregate_trials([r]) is r

    def test_mean_tip(self):
        reps = [EvaluationReport.from_errors("R50", t, 0.1) for t in (1.0, 2.0, 3.0)]
        agg = aggregate_trials(reps)
        assert agg.tip_error == pytest.approx(2.0)
        assert agg.trials == 3

    def test_mean_shape_renormalised(self):
        reps = [EvaluationReport.from_errors("R46", 1.0, s) for s in (0.3, 0.4, 0.5)]
        agg = aggregate_trials(reps)
        assert agg.shape_error == pytest.approx(0.4)
        assert agg.shape_error_normalized == pytest.approx(0.4 / 45 * 100)
        assert round(agg.shape_error_normalized, 2) == 0.89

    def test_mixed_labels(self):
        with pytest.raises(DomainError):
            aggregate_trials([EvaluationReport.from_errors("R46", 1, 1), EvaluationReport.from_errors("R53", 1, 1)])

    def test_empty(self):
        with pytest.raises(InsufficientDataError):
            aggregate_trials([])


def test_report_normalisation_invariant():
    r = EvaluationReport.from_errors("R39", 1.234, 0.567, 45.0)
    assert abs(r.tip_error_normalized - r.tip_error / 45 * 100) < 5e-3
    with pytest.raises(DomainError):
        EvaluationReport("x", -1.0, 0.0, 0.0, 0.0)


@pytest.mark.parametrize("radius", [39.0, 121.0, 1000.0])
def test_fit_circle(radius):
    a = arc(radius, 45.0)
    cx, cy, r = fit_circle(a.points)
    assert r == pytest.approx(radius, rel=1e-9)
    assert (cx, cy) == pytest.approx((0.0, radius), abs=1e-6 * radius)
