"""Free-space-optical channel statistics for the QBS -> RIS -> user path.

The instantaneous channel gain factorizes as

    h = varsigma * eta * h_p * h_a * h_g

with deterministic atmospheric loss h_p, Gamma-Gamma turbulence fading h_a
(unit mean), and a pointing-error gain h_g supported on [0, A0]. This module
provides the deterministic factors, both PDFs, and seeded samplers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .rng import as_generator
from .specfun.bessel import _kve_u
from .specfun.basic import erf_fn

# Named presets used throughout the experiments.
WEATHER_ATTENUATION_DB_PER_KM = {"sunny": 0.43, "rainy": 6.27}
TURBULENCE_CN2 = {"moderate": 5e-14, "strong": 1e-13}
POINTING_JITTER = {"low": (1e-3, 0.25e-3), "high": (3e-3, 1e-3)}  # (sigma_theta, sigma_phi) [rad]


@dataclass(frozen=True, slots=True)
class EnvironmentParams:
    """Optical-plant and weather parameters of one deployment."""

    wavelength: float = 1550e-9          # [m]
    attenuation_db_per_km: float = 0.43  # [dB/km]
    cn2: float = 5e-14                   # refractive-index structure const [m^-2/3]
    aperture_radius: float = 0.55        # receiver aperture radius [m]
    beam_divergence: float = 8e-3        # full divergence angle [rad]
    sigma_theta: float = 1e-3            # QBS pointing jitter std [rad]
    sigma_phi: float = 0.25e-3           # RIS orientation jitter std [rad]
    ris_efficiency: float = 0.97         # RIS reflection efficiency, in (0, 1]
    responsivity: float = 0.95           # detector efficiency, in (0, 1]
    gain_threshold: float = 0.05         # photon-delivery gain threshold, in (0, 1)

    def __post_init__(self) -> None:
        positive = ("wavelength", "attenuation_db_per_km", "aperture_radius",
                    "beam_divergence", "sigma_theta", "sigma_phi")
        for name in positive:
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.cn2 < 0:
            raise ValueError("cn2 must be nonnegative")
        if not 0 < self.ris_efficiency <= 1:
            raise ValueError("ris_efficiency must be in (0, 1]")
        if not 0 < self.responsivity <= 1:
            raise ValueError("responsivity must be in (0, 1]")
        if not 0 < self.gain_threshold < 1:
            raise ValueError("gain_threshold must be in (0, 1)")

    @property
    def wave_number(self) -> float:
        """Optical wave number k = 2 pi / lambda [rad/m]."""
        return 2.0 * math.pi / self.wavelength


def make_environment(weather: str = "sunny", turbulence: str = "moderate",
                     pointing: str = "low", **overrides) -> EnvironmentParams:
    """EnvironmentParams from the named presets, with field overrides."""
    try:
        kappa = WEATHER_ATTENUATION_DB_PER_KM[weather]
        cn2 = TURBULENCE_CN2[turbulence]
        sigma_theta, sigma_phi = POINTING_JITTER[pointing]
    except KeyError as exc:
        raise ValueError(f"unknown preset {exc.args[0]!r}") from exc
    env = EnvironmentParams(attenuation_db_per_km=kappa, cn2=cn2,
                            sigma_theta=sigma_theta, sigma_phi=sigma_phi)
    return replace(env, **overrides) if overrides else env


@dataclass(frozen=True, slots=True)
class TurbulenceParams:
    """Gamma-Gamma shape parameters for one path."""

    alpha: float        # large-scale cell count
    beta: float         # small-scale cell count
    rytov_var: float    # Rytov variance the shapes were derived from

    def __post_init__(self) -> None:
        if not (self.alpha > 0 and self.beta > 0):
            raise ValueError("alpha and beta must be positive")
        if self.rytov_var < 0:
            raise ValueError("rytov_var must be nonnegative")


@dataclass(frozen=True, slots=True)
class PointingParams:
    """Pointing-error gain model parameters for one path."""

    a0: float         # peak collected power fraction, in (0, 1]
    wz: float         # beam waist at the receiver [m]
    wz_eq_sq: float   # equivalent beam waist squared [m^2]
    v: float          # aperture/waist ratio sqrt(pi) r_a / (sqrt(2) wz)
    vartheta: float   # power-law exponent of the gain distribution

    def __post_init__(self) -> None:
        if not 0 < self.a0 <= 1:
            raise ValueError("a0 must be in (0, 1]")
        if not (self.wz > 0 and self.wz_eq_sq > 0 and self.vartheta > 0):
            raise ValueError("wz, wz_eq_sq, vartheta must be positive")


def atmospheric_loss(env: EnvironmentParams, d_e2e: float) -> float:
    """Deterministic weather attenuation gain 10^(-kappa d / 10), d in km."""
    if d_e2e < 0:
        raise ValueError("distance must be nonnegative")
    return 10.0 ** (-env.attenuation_db_per_km * (d_e2e / 1000.0) / 10.0)


def rytov_variance(env: EnvironmentParams, d: float) -> float:
    """Rytov variance 1.23 Cn2 k^(7/6) d^(11/6) over a path of length d [m]."""
    if d < 0:
        raise ValueError("distance must be nonnegative")
    return 1.23 * env.cn2 * env.wave_number ** (7.0 / 6.0) * d ** (11.0 / 6.0)


def turbulence_params(rytov_var: float) -> TurbulenceParams:
    """Gamma-Gamma shapes from the Rytov variance s:

        alpha = 1 / (exp(0.49 s / (1 + 1.11 s^(12/5))^(7/6)) - 1)
        beta  = 1 / (exp(0.51 s / (1 + 0.69 s^(12/5))^(5/6)) - 1)

    Both diverge as s -> 0 (vanishing scintillation).
    """
    if not rytov_var > 0:
        raise ValueError("rytov_var must be positive")
    s12 = rytov_var ** 2.4
    alpha = 1.0 / math.expm1(0.49 * rytov_var / (1.0 + 1.11 * s12) ** (7.0 / 6.0))
    beta = 1.0 / math.expm1(0.51 * rytov_var / (1.0 + 0.69 * s12) ** (5.0 / 6.0))
    return TurbulenceParams(alpha=alpha, beta=beta, rytov_var=rytov_var)


def gamma_gamma_pdf(ha, turb: TurbulenceParams):
    """Unit-mean Gamma-Gamma fading density at gain ha (scalar or array).

    Evaluated in log space with the exponentially scaled Bessel K so that
    large alpha + beta (weak turbulence) neither overflows the prefactor
    nor underflows the Bessel factor.
    """
    a, b = turb.alpha, turb.beta
    ha_arr = np.asarray(ha, dtype=np.float64)
    if not np.all(ha_arr > 0):
        raise ValueError("gamma_gamma_pdf requires ha > 0")
    log_pref = (math.log(2.0) + 0.5 * (a + b) * math.log(a * b)
                - math.lgamma(a) - math.lgamma(b))
    z = 2.0 * np.sqrt(a * b * ha_arr)
    log_pdf = (log_pref + (0.5 * (a + b) - 1.0) * np.log(ha_arr)
               - z + np.log(_kve_u(a - b, z)))
    out = np.exp(log_pdf)
    return float(out) if np.ndim(ha) == 0 else out


def pointing_params(env: EnvironmentParams, d_sr: float, d_ri: float) -> PointingParams:
    """Pointing-error model for a QBS -> RIS (d_sr) -> user (d_ri) path.

    The beam widens over the full path, wz = phi_d * (d_sr + d_ri); jitter at
    the QBS displaces the spot by the full path length while RIS orientation
    jitter acts over the second hop with doubled angular gain.
    """
    if not (d_sr > 0 and d_ri > 0):
        raise ValueError("distances must be positive")
    d_e2e = d_sr + d_ri
    wz = env.beam_divergence * d_e2e
    v = math.sqrt(math.pi) * env.aperture_radius / (math.sqrt(2.0) * wz)
    erf_v = erf_fn(v)
    a0 = erf_v * erf_v
    # Full-capture limit: exp(-v^2) underflows once the aperture dwarfs the
    # beam; the equivalent width diverges and vartheta = inf means a point
    # mass at A0 (no pointing loss), which the CDF/sampler handle exactly.
    gauss_tail = 2.0 * v * math.exp(-v * v)
    wz_eq_sq = (math.inf if gauss_tail == 0.0
                else wz * wz * math.sqrt(math.pi) * erf_v / gauss_tail)
    jitter_var = (4.0 * d_e2e ** 2 * env.sigma_theta ** 2
                  + 16.0 * d_ri ** 2 * env.sigma_phi ** 2)
    vartheta = wz_eq_sq / jitter_var
    return PointingParams(a0=a0, wz=wz, wz_eq_sq=wz_eq_sq, v=v, vartheta=vartheta)


def pointing_pdf(hg, pt: PointingParams):
    """Power-law pointing-gain density vartheta hg^(vartheta-1) / A0^vartheta."""
    hg_arr = np.asarray(hg, dtype=np.float64)
    if np.any(hg_arr < 0) or np.any(hg_arr > pt.a0):
        raise ValueError(f"pointing gain must lie in [0, {pt.a0}]")
    out = (pt.vartheta / pt.a0 ** pt.vartheta) * hg_arr ** (pt.vartheta - 1.0)
    return float(out) if np.ndim(hg) == 0 else out


def pointing_cdf(hg, pt: PointingParams):
    """CDF (hg / A0)^vartheta of the pointing gain on [0, A0]."""
    hg_arr = np.asarray(hg, dtype=np.float64)
    if np.any(hg_arr < 0) or np.any(hg_arr > pt.a0):
        raise ValueError(f"pointing gain must lie in [0, {pt.a0}]")
    out = (hg_arr / pt.a0) ** pt.vartheta
    return float(out) if np.ndim(hg) == 0 else out


def sample_turbulence(turb: TurbulenceParams, rng, size=None):
    """Draw unit-mean Gamma-Gamma fading as a product of two Gamma variates."""
    gen = as_generator(rng)
    a, b = turb.alpha, turb.beta
    return gen.gamma(a, 1.0 / a, size) * gen.gamma(b, 1.0 / b, size)


def sample_pointing(pt: PointingParams, rng, size=None):
    """Draw pointing gains by inverse CDF: A0 * U^(1/vartheta)."""
    gen = as_generator(rng)
    return pt.a0 * gen.random(size) ** (1.0 / pt.vartheta)


def sample_channel_gain(env: EnvironmentParams, turb: TurbulenceParams,
                        pt: PointingParams, hp: float, rng, size=None):
    """Draw the composite channel gain varsigma eta h_p h_a h_g."""
    if not 0 < hp <= 1:
        raise ValueError("hp must be in (0, 1]")
    gen = as_generator(rng)
    ha = sample_turbulence(turb, gen, size)
    hg = sample_pointing(pt, gen, size)
    return env.ris_efficiency * env.responsivity * hp * ha * hg
