import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ofdrshape.calibration import (
    JIG_RADII,
    PUBLISHED_MODEL,
    CalibrationModel,
    CalibrationSample,
    PowerLaw,
    fit_calibration,
    fit_power_law,
    fit_residuals,
    radius_from_strain,
    strain_from_radius,
)
from ofdrshape.errors import DomainError, InsufficientDataError, RankDeficiencyError
from ofdrshape.simulator import simulate_jig

# frozen from a 40-digit mpmath evaluation of the closed forms
R_POS_1000 = 163.42494220375257
R_NEG_1500 = -100.73400272917276
EPS_R39 = 3768.4335698425847
EPS_R117 = 1362.6424816587302


def exact_samples(law, radii=JIG_RADII):
    return [(float(law.strain(r)), r) for r in radii]


class TestFitPowerLaw:
    def test_two_points_pass_exactly(self):
        law = fit_power_law([(1000, 163.43), (3770, 39.0)])
        # 2x2 log-log system solved by hand (mpmath)
        assert law.a == pytest.approx(283391.68832307558, rel=1e-10)
        assert law.b == pytest.approx(-1.0796851092809878, rel=1e-12)
        assert law.radius(1000) == pytest.approx(163.43, rel=1e-12)
        assert law.radius(3770) == pytest.approx(39.0, rel=1e-12)

    @pytest.mark.parametrize("law", [PUBLISHED_MODEL.positive, PUBLISHED_MODEL.negative])
    def test_recovers_generating_law(self, law):
        fitted = fit_power_law(exact_samples(law))
        assert fitted.a == pytest.approx(law.a, rel=1e-10)
        assert fitted.b == pytest.approx(law.b, rel=1e-10)

    def test_identical_strains_are_rank_deficient(self):
        with pytest.raises(RankDeficiencyError):
            fit_power_law([(500.0, 40.0), (500.0, 60.0), (500.0, 80.0)])

    @pytest.mark.parametrize("samples", [[], [(1000.0, 100.0)]])
    def test_insufficient(self, samples):
        with pytest.raises(InsufficientDataError):
            fit_power_law(samples)

    @pytest.mark.parametrize("bad", [(0.0, 50.0), (-10.0, 50.0), (100.0, 0.0), (100.0, math.inf)])
    def test_domain(self, bad):
        with pytest.raises(DomainError):
            fit_power_law([(1000.0, 100.0), bad])

    @given(a=st.floats(1e3, 1e7), b=st.floats(-2.0, -0.3))
    def test_fit_idempotence(self, a, b):
        law = PowerLaw(a, b)
        strains = np.geomspace(50, 5000, 9)
        fitted = fit_power_law(list(zip(strains, law.radius(strains))))
        assert fitted.a == pytest.approx(a, rel=1e-10)
        assert fitted.b == pytest.approx(b, rel=1e-10)


class TestRadiusFromStrain:
    def test_positive_branch(self, model):
        assert radius_from_strain(model, 1000.0) == pytest.approx(R_POS_1000, rel=1e-12)

    def test_negative_branch(self, model):
        assert radius_from_strain(model, -1500.0) == pytest.approx(R_NEG_1500, rel=1e-12)

    def test_dead_zone_is_straight(self, model):
        assert math.isinf(radius_from_strain(model, 3.0))
        assert math.isinf(radius_from_strain(model, -10.0))

    def test_vectorised(self, model):
        out = radius_from_strain(model, np.array([1000.0, 0.0, -1500.0]))
        np.testing.assert_allclose(out, [R_POS_1000, np.inf, R_NEG_1500], rtol=1e-12)

    def test_nonfinite(self, model):
        with pytest.raises(DomainError):
            radius_from_strain(model, math.nan)

    @given(st.floats(10.001, 1e5))
    def test_sign_and_monotonic(self, eps):
        m = PUBLISHED_MODEL
        assert radius_from_strain(m, eps) > 0 > radius_from_strain(m, -eps)
        assert radius_from_strain(m, eps * 1.01) < radius_from_strain(m, eps)
        assert abs(radius_from_strain(m, -eps * 1.01)) < abs(radius_from_strain(m, -eps))


class TestStrainFromRadius:
    def test_tube_radii(self, model):
        assert strain_from_radius(model, 39.0) == pytest.approx(EPS_R39, rel=1e-12)
        assert strain_from_radius(model, 117.0) == pytest.approx(EPS_R117, rel=1e-12)

    def test_straight(self, model):
        assert strain_from_radius(model, math.inf) == 0.0
        assert strain_from_radius(model, -math.inf) == 0.0

    def test_zero_radius(self, model):
        with pytest.raises(DomainError):
            strain_from_radius(model, 0.0)

    def test_flags_dead_zone(self, model):
        eps, clipped = strain_from_radius(model, 1e5, full_output=True)
        assert eps == 0.0 and clipped
        eps, clipped = strain_from_radius(model, -50.0, full_output=True)
        assert eps < 0 and not clipped

    @given(st.floats(10.5, 2e4), st.sampled_from([1.0, -1.0]))
    def test_round_trip(self, mag, sign):
        eps = sign * mag
        back = strain_from_radius(PUBLISHED_MODEL, radius_from_strain(PUBLISHED_MODEL, eps))
        assert back == pytest.approx(eps, rel=1e-9)


def test_model_requires_positive_dead_zone():
    with pytest.raises(DomainError):
        CalibrationModel(PUBLISHED_MODEL.positive, PUBLISHED_MODEL.negative, dead_zone=0.0)


def test_power_law_invariants():
    with pytest.raises(DomainError):
        PowerLaw(-1.0, -1.0)
    with pytest.raises(DomainError):
        PowerLaw(1.0, 0.5)


def test_sample_invariants():
    CalibrationSample(math.inf, "pos", 2.0)
    with pytest.raises(DomainError):
        CalibrationSample(-5.0, "pos", 100.0)
    with pytest.raises(DomainError):
        CalibrationSample(50.0, "sideways", 100.0)
    with pytest.raises(DomainError):
        CalibrationSample(50.0, "neg", -1.0)


class TestResiduals:
    def test_exact_data_is_zero(self):
        res = fit_residuals(PUBLISHED_MODEL.positive, exact_samples(PUBLISHED_MODEL.positive))
        assert res.rmse_log == pytest.approx(0.0, abs=1e-13)
        assert res.rmse_radius == pytest.approx(0.0, abs=1e-10)
        assert res.max_abs_error == pytest.approx(0.0, abs=1e-10)

    def test_one_percent_radius_bias(self):
        law = PUBLISHED_MODEL.positive
        samples = [(e, 1.01 * r) for e, r in exact_samples(law)]
        res = fit_residuals(law, samples)
        radii = np.array(JIG_RADII)
        # direct computation: every residual is exactly 1 % of its radius
        assert res.rmse_radius == pytest.approx(0.01 * np.sqrt(np.mean(radii**2)), rel=1e-9)
        assert res.rmse_radius == pytest.approx(0.01 * radii.mean(), rel=0.1)
        np.testing.assert_allclose(res.log_residuals, np.log(1.01), rtol=1e-9)

    def test_single_sample(self):
        with pytest.raises(InsufficientDataError):
            fit_residuals(PUBLISHED_MODEL.positive, [(1000.0, 163.0)])


def test_fit_calibration_pools_trials_and_skips_straight():
    samples = simulate_jig(PUBLISHED_MODEL, trials=3)
    assert sum(s.straight for s in samples) == 3
    model = fit_calibration(samples, dead_zone=12.0)
    assert model.dead_zone == 12.0
    assert model.positive.a == pytest.approx(284000, rel=1e-10)
    assert model.negative.b == pytest.approx(-0.999, rel=1e-10)
