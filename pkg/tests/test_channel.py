import math

import numpy as np
import pytest

from risqnet.channel import (POINTING_JITTER, TURBULENCE_CN2,
                             WEATHER_ATTENUATION_DB_PER_KM, EnvironmentParams,
                             atmospheric_loss, gamma_gamma_pdf,
                             make_environment, pointing_cdf, pointing_params,
                             pointing_pdf, rytov_variance,
                             sample_channel_gain, sample_pointing,
                             sample_turbulence, turbulence_params)
from risqnet.specfun import integrate

# Frozen reference values (mpmath, 40 digits) at the default optical plant:
# 1550 nm, 0.43 dB/km, Cn2 5e-14, r_a 0.55 m, phi_d 8 mrad, low jitter.
HP_500M = 0.9516998481129437
RYTOV_500M = 0.27934634215051655
ALPHA_500M = 7.261602999254503
BETA_500M = 6.719344812432391
ALPHA_RYTOV1 = 4.393859025392147
BETA_RYTOV1 = 2.563631979503695
WZ_500M = 4.0
V_500M = 0.17233069388088128
A0_500M = 0.0370741293983656
VARTHETA_250_250 = 15.360538771409
GG_PDF_AT_1 = 0.7214625425469556  # density at ha=1 for the 500 m shapes


@pytest.fixture(scope="module")
def env():
    return make_environment("sunny", "moderate", pointing="low")


class TestEnvironment:
    def test_presets(self):
        assert WEATHER_ATTENUATION_DB_PER_KM == {"sunny": 0.43, "rainy": 6.27}
        assert TURBULENCE_CN2 == {"moderate": 5e-14, "strong": 1e-13}
        assert POINTING_JITTER["low"] == (1e-3, 0.25e-3)
        assert POINTING_JITTER["high"] == (3e-3, 1e-3)

    def test_make_environment_resolves_presets(self):
        env = make_environment("rainy", "strong", "high")
        assert env.attenuation_db_per_km == 6.27
        assert env.cn2 == 1e-13
        assert (env.sigma_theta, env.sigma_phi) == (3e-3, 1e-3)

    def test_make_environment_overrides(self):
        env = make_environment("sunny", "moderate", gain_threshold=0.01)
        assert env.gain_threshold == 0.01
        assert env.attenuation_db_per_km == 0.43

    def test_unknown_preset(self):
        with pytest.raises(ValueError):
            make_environment("drizzle")

    def test_wave_number(self, env):
        assert env.wave_number == pytest.approx(2 * math.pi / 1550e-9)

    def test_validation(self):
        with pytest.raises(ValueError):
            EnvironmentParams(wavelength=0.0)
        with pytest.raises(ValueError):
            EnvironmentParams(cn2=-1e-14)
        with pytest.raises(ValueError):
            EnvironmentParams(ris_efficiency=1.5)
        with pytest.raises(ValueError):
            EnvironmentParams(gain_threshold=1.0)


class TestAtmosphericLoss:
    def test_reference_value(self, env):
        assert atmospheric_loss(env, 500.0) == pytest.approx(HP_500M,
                                                             rel=1e-12)

    def test_zero_distance(self, env):
        assert atmospheric_loss(env, 0.0) == 1.0

    def test_segment_additivity(self, env):
        for d1, d2 in ((100.0, 400.0), (250.0, 250.0), (10.0, 990.0)):
            assert atmospheric_loss(env, d1 + d2) == pytest.approx(
                atmospheric_loss(env, d1) * atmospheric_loss(env, d2),
                rel=1e-12)

    def test_strictly_decreasing_in_distance_and_attenuation(self):
        env = make_environment()
        losses = [atmospheric_loss(env, d) for d in np.linspace(0, 2e3, 10)]
        assert all(a > b for a, b in zip(losses, losses[1:]))
        by_kappa = [atmospheric_loss(make_environment(
            attenuation_db_per_km=k), 500.0) for k in np.linspace(0.1, 10, 10)]
        assert all(a > b for a, b in zip(by_kappa, by_kappa[1:]))

    def test_negative_distance_rejected(self, env):
        with pytest.raises(ValueError):
            atmospheric_loss(env, -1.0)


class TestRytovVariance:
    def test_reference_value(self, env):
        assert rytov_variance(env, 500.0) == pytest.approx(RYTOV_500M,
                                                           rel=1e-12)

    def test_zero_cn2(self):
        env = EnvironmentParams(cn2=0.0)
        assert rytov_variance(env, 500.0) == 0.0

    def test_power_law_in_distance(self, env):
        assert rytov_variance(env, 1000.0) == pytest.approx(
            rytov_variance(env, 500.0) * 2.0 ** (11.0 / 6.0), rel=1e-12)

    def test_increasing_in_distance_and_cn2(self, env):
        vals = [rytov_variance(env, d) for d in np.linspace(50, 2000, 10)]
        assert all(a < b for a, b in zip(vals, vals[1:]))
        assert rytov_variance(make_environment(turbulence="strong"), 500.0) \
            > rytov_variance(env, 500.0)


class TestTurbulenceParams:
    def test_reference_shapes(self):
        turb = turbulence_params(RYTOV_500M)
        assert turb.alpha == pytest.approx(ALPHA_500M, rel=1e-12)
        assert turb.beta == pytest.approx(BETA_500M, rel=1e-12)

    def test_unit_rytov_independent_evaluation(self):
        turb = turbulence_params(1.0)
        assert turb.alpha == pytest.approx(ALPHA_RYTOV1, rel=1e-12)
        assert turb.beta == pytest.approx(BETA_RYTOV1, rel=1e-12)

    def test_alpha_exceeds_beta_across_regimes(self):
        for s in np.geomspace(1e-3, 50.0, 40):
            turb = turbulence_params(float(s))
            assert turb.alpha > turb.beta > 0.0

    def test_weak_turbulence_limit_diverges(self):
        turb = turbulence_params(1e-6)
        assert turb.alpha > 1e5 and turb.beta > 1e5

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            turbulence_params(0.0)


class TestGammaGammaPdf:
    @pytest.fixture(scope="class")
    @staticmethod
    def turb():
        return turbulence_params(RYTOV_500M)

    def test_reference_density(self, turb):
        assert gamma_gamma_pdf(1.0, turb) == pytest.approx(GG_PDF_AT_1,
                                                           rel=1e-8)

    def test_normalization(self, turb):
        val = integrate(lambda a: gamma_gamma_pdf(a, turb), 0.0, math.inf)
        assert val == pytest.approx(1.0, abs=1e-8)

    def test_unit_mean(self, turb):
        val = integrate(lambda a: a * gamma_gamma_pdf(a, turb), 0.0, math.inf)
        assert val == pytest.approx(1.0, abs=1e-6)

    def test_nonnegative_on_log_grid(self, turb):
        grid = np.geomspace(1e-6, 50.0, 200)
        assert np.all(gamma_gamma_pdf(grid, turb) >= 0.0)

    def test_weak_turbulence_shapes_stay_finite(self):
        # large alpha+beta used to overflow naive prefactors
        turb = turbulence_params(1e-3)
        val = gamma_gamma_pdf(1.0, turb)
        assert math.isfinite(val) and val > 0.0

    def test_rejects_nonpositive_gain(self, turb):
        with pytest.raises(ValueError):
            gamma_gamma_pdf(0.0, turb)


class TestPointingParams:
    def test_reference_geometry(self, env):
        pt = pointing_params(env, 250.0, 250.0)
        assert pt.wz == pytest.approx(WZ_500M, rel=1e-12)
        assert pt.v == pytest.approx(V_500M, rel=1e-12)
        assert pt.a0 == pytest.approx(A0_500M, rel=1e-12)
        assert pt.vartheta == pytest.approx(VARTHETA_250_250, rel=1e-12)

    def test_huge_aperture_saturates_a0(self, env):
        from dataclasses import replace
        pt = pointing_params(replace(env, aperture_radius=1e3), 250.0, 250.0)
        assert pt.a0 == pytest.approx(1.0, abs=1e-12)
        # full-capture limit: point mass at A0, no pointing loss
        assert pt.vartheta == math.inf
        assert pointing_cdf(0.5 * pt.a0, pt) == 0.0
        assert pointing_cdf(pt.a0, pt) == 1.0
        draws = sample_pointing(pt, 3, 100)
        assert np.all(draws == pt.a0)

    def test_vartheta_decreases_with_transmitter_jitter(self):
        vts = [pointing_params(make_environment(sigma_theta=s),
                               250.0, 250.0).vartheta
               for s in np.linspace(0.5e-3, 5e-3, 10)]
        assert all(a > b for a, b in zip(vts, vts[1:]))

    def test_rejects_nonpositive_distances(self, env):
        with pytest.raises(ValueError):
            pointing_params(env, 0.0, 250.0)


class TestPointingDistribution:
    @pytest.fixture(scope="class")
    @staticmethod
    def pt():
        return pointing_params(make_environment(), 250.0, 250.0)

    def test_pdf_normalizes_analytically(self, pt):
        val = integrate(lambda g: pointing_pdf(g, pt), 0.0, pt.a0)
        assert val == pytest.approx(1.0, rel=1e-9)

    def test_unit_exponent_is_uniform(self, env):
        from dataclasses import replace
        pt = pointing_params(env, 250.0, 250.0)
        uniform = replace(pt, vartheta=1.0)
        grid = np.linspace(1e-6, uniform.a0 - 1e-6, 20)
        assert np.allclose(pointing_pdf(grid, uniform), 1.0 / uniform.a0)

    def test_cdf_at_half_peak(self, pt):
        # power-law CDF: (1/2)^vartheta
        assert pointing_cdf(pt.a0 / 2.0, pt) == pytest.approx(
            2.0 ** (-pt.vartheta), rel=1e-12)
        assert pointing_cdf(pt.a0 / 2.0, pt) == pytest.approx(2.377e-5,
                                                              rel=1e-3)

    def test_cdf_endpoints(self, pt):
        assert pointing_cdf(0.0, pt) == 0.0
        assert pointing_cdf(pt.a0, pt) == pytest.approx(1.0)

    def test_rejects_out_of_support(self, pt):
        with pytest.raises(ValueError):
            pointing_pdf(pt.a0 * 1.01, pt)
        with pytest.raises(ValueError):
            pointing_cdf(-0.1, pt)


class TestSamplers:
    @pytest.fixture(scope="class")
    @staticmethod
    def setup():
        env = make_environment()
        turb = turbulence_params(rytov_variance(env, 500.0))
        pt = pointing_params(env, 250.0, 250.0)
        return env, turb, pt

    def test_turbulence_support_and_mean(self, setup):
        _, turb, _ = setup
        draws = sample_turbulence(turb, 7, 200_000)
        assert np.all(draws > 0.0)
        se = draws.std() / math.sqrt(len(draws))
        assert abs(draws.mean() - 1.0) < 3.0 * se

    def test_pointing_support(self, setup):
        _, _, pt = setup
        draws = sample_pointing(pt, 8, 100_000)
        assert np.all(draws >= 0.0)
        assert np.all(draws <= pt.a0)

    def test_composite_gain_moment(self, setup):
        # E[h] = varsigma eta hp E[ha] E[hg] with E[ha]=1,
        # E[hg] = A0 vartheta / (vartheta + 1)
        env, turb, pt = setup
        hp = atmospheric_loss(env, 500.0)
        draws = sample_channel_gain(env, turb, pt, hp, 11, 1_000_000)
        want = (env.ris_efficiency * env.responsivity * hp
                * pt.a0 * pt.vartheta / (pt.vartheta + 1.0))
        se = draws.std() / math.sqrt(len(draws))
        assert abs(draws.mean() - want) < 3.0 * se

    def test_composite_gain_support(self, setup):
        # the composite draw consumes the turbulence stream first, so a
        # fresh sampler from the same seed reproduces each draw's ha and
        # the bound h <= varsigma eta hp A0 ha holds elementwise
        env, turb, pt = setup
        hp = atmospheric_loss(env, 500.0)
        draws = sample_channel_gain(env, turb, pt, hp, 12, 50_000)
        ha = sample_turbulence(turb, 12, 50_000)
        cap = env.ris_efficiency * env.responsivity * hp * pt.a0
        assert np.all(draws >= 0.0)
        assert np.all(draws <= cap * ha * (1.0 + 1e-12))

    def test_determinism(self, setup):
        env, turb, pt = setup
        hp = atmospheric_loss(env, 500.0)
        a = sample_channel_gain(env, turb, pt, hp, 99, 1000)
        b = sample_channel_gain(env, turb, pt, hp, 99, 1000)
        assert np.array_equal(a, b)
        assert not np.array_equal(
            a, sample_channel_gain(env, turb, pt, hp, 100, 1000))

    def test_invalid_hp(self, setup):
        env, turb, pt = setup
        with pytest.raises(ValueError):
            sample_channel_gain(env, turb, pt, 0.0, 1, 10)
