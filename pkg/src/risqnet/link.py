"""Photon-delivery success probability of one QBS -> RIS -> user link.

A photon survives if the composite gain clears the detection threshold,
which conditions on the product of turbulence fading and pointing gain:

    P_succ = P(h_a h_g > chi_th / h_p),   chi_th = zeta_th / (varsigma eta).

Marginalizing the pointing gain analytically (its CDF is a power law)
leaves a single integral of the Gamma-Gamma density against
1 - min(1, (a_low / a)^vartheta) with a_low = chi_th / (h_p A0). The
production path evaluates that integral with a compiled adaptive
Gauss-Kronrod rule; an independent Monte Carlo estimator over the raw
channel samplers cross-validates it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numba import njit

from .channel import (EnvironmentParams, PointingParams, TurbulenceParams,
                      atmospheric_loss, pointing_params, rytov_variance,
                      turbulence_params)
from .geometry import NetworkLayout, distance
from .rng import as_generator
from .specfun.bessel import _kv_core
from .specfun.quadrature import (DEFAULT_QUADRATURE, GAUSS_WEIGHTS, GK_NODES,
                                 GK_WEIGHTS, QuadratureConfig, QuadratureError)

# Truncate the fading integral where the remaining Gamma-Gamma mass is
# certainly below this; the quadrature tolerances sit far above it.
_TAIL_MASS = 1e-12

DEFAULT_MC_SAMPLES = 1_000_000


@dataclass(frozen=True, slots=True)
class LinkBudget:
    """Everything Theorem-style success evaluation needs for one link."""

    hp: float                 # atmospheric loss gain, in (0, 1]
    turb: TurbulenceParams
    pt: PointingParams
    chi_th: float             # gain threshold referred past varsigma eta
    d_sr: float               # QBS -> RIS [m]
    d_ri: float               # RIS -> user [m]

    @property
    def d_e2e(self) -> float:
        return self.d_sr + self.d_ri

    @property
    def a_low(self) -> float:
        """Lower integration limit: fading below this cannot succeed."""
        return self.chi_th / (self.hp * self.pt.a0)


def budget_from_distances(env: EnvironmentParams, d_sr: float, d_ri: float) -> LinkBudget:
    """LinkBudget for explicit hop lengths (meters)."""
    d_e2e = d_sr + d_ri
    return LinkBudget(
        hp=atmospheric_loss(env, d_e2e),
        turb=turbulence_params(rytov_variance(env, d_e2e)),
        pt=pointing_params(env, d_sr, d_ri),
        chi_th=env.gain_threshold / (env.ris_efficiency * env.responsivity),
        d_sr=d_sr,
        d_ri=d_ri,
    )


def build_link_budget(env: EnvironmentParams, layout: NetworkLayout,
                      user_index: int) -> LinkBudget:
    """LinkBudget for one user of a layout."""
    d_sr = distance(layout.qbs, layout.ris)
    d_ri = distance(layout.ris, layout.users[user_index])
    return budget_from_distances(env, d_sr, d_ri)


@njit(cache=True)
def _integrand(a: float, alpha: float, beta: float, nu: float, log_pref: float,
               expo: float, vartheta: float, a_low: float) -> float:
    if a <= a_low:
        return 0.0
    z = 2.0 * math.sqrt(alpha * beta * a)
    kve = _kv_core(nu, z, True)
    pdf = math.exp(log_pref + expo * math.log(a) - z + math.log(kve))
    return pdf * (1.0 - (a_low / a) ** vartheta)


@njit(cache=True)
def _gk15_cell(lo: float, hi: float, alpha: float, beta: float, nu: float,
               log_pref: float, expo: float, vartheta: float,
               a_low: float) -> tuple[float, float]:
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    kron = 0.0
    gauss = 0.0
    for i in range(15):
        fx = _integrand(mid + half * GK_NODES[i], alpha, beta, nu, log_pref,
                        expo, vartheta, a_low)
        kron += GK_WEIGHTS[i] * fx
        gauss += GAUSS_WEIGHTS[i] * fx
    kron *= half
    gauss *= half
    return kron, abs(kron - gauss)


@njit(cache=True)
def _psucc_adaptive(alpha: float, beta: float, nu: float, log_pref: float,
                    expo: float, vartheta: float, a_low: float, hi: float,
                    rtol: float, atol: float,
                    max_sub: int) -> tuple[float, float, int]:
    """Adaptive bisection on [a_low, hi]; returns (value, error, status)."""
    cap = max_sub + 4
    los = np.empty(cap)
    his = np.empty(cap)
    vals = np.empty(cap)
    errs = np.empty(cap)
    v, e = _gk15_cell(a_low, hi, alpha, beta, nu, log_pref, expo, vartheta, a_low)
    los[0], his[0], vals[0], errs[0] = a_low, hi, v, e
    n = 1
    total_v = v
    total_e = e
    for _ in range(max_sub):
        if not math.isfinite(total_v):
            return total_v, total_e, 2
        if total_e <= max(atol, rtol * abs(total_v)):
            return total_v, total_e, 0
        worst = 0
        for i in range(1, n):
            if errs[i] > errs[worst]:
                worst = i
        lo2, hi2 = los[worst], his[worst]
        mid = 0.5 * (lo2 + hi2)
        v1, e1 = _gk15_cell(lo2, mid, alpha, beta, nu, log_pref, expo,
                            vartheta, a_low)
        v2, e2 = _gk15_cell(mid, hi2, alpha, beta, nu, log_pref, expo,
                            vartheta, a_low)
        total_v += v1 + v2 - vals[worst]
        total_e += e1 + e2 - errs[worst]
        his[worst], vals[worst], errs[worst] = mid, v1, e1
        los[n], his[n], vals[n], errs[n] = mid, hi2, v2, e2
        n += 1
        if n >= cap:
            break
    if total_e <= max(atol, rtol * abs(total_v)):
        return total_v, total_e, 0
    return total_v, total_e, 1


def _gg_log_pdf_scalar(a: float, alpha: float, beta: float, log_pref: float) -> float:
    z = 2.0 * math.sqrt(alpha * beta * a)
    kve = _kv_core(alpha - beta, z, True)
    if not (kve > 0 and math.isfinite(kve)):
        return -math.inf
    return log_pref + (0.5 * (alpha + beta) - 1.0) * math.log(a) - z + math.log(kve)


def _tail_point(alpha: float, beta: float, a_low: float, log_pref: float) -> float:
    """Point beyond which the remaining Gamma-Gamma mass is < _TAIL_MASS.

    The density decays like exp(-2 sqrt(alpha beta a)), so the tail beyond u
    is bounded by ~pdf(u) * sqrt(u / (alpha beta)); doubling u until that
    bound collapses brackets the truncation point.
    """
    u = max(1.0, 2.0 * a_low)
    log_tol = math.log(_TAIL_MASS / 3.0)
    for _ in range(60):
        log_bound = (_gg_log_pdf_scalar(u, alpha, beta, log_pref)
                     + 0.5 * math.log(u / (alpha * beta)))
        if log_bound < log_tol:
            return u
        u *= 2.0
    return u


def prob_success(budget: LinkBudget, cfg: QuadratureConfig | None = None) -> float:
    """Photon-delivery success probability by adaptive quadrature."""
    cfg = cfg or DEFAULT_QUADRATURE
    alpha, beta = budget.turb.alpha, budget.turb.beta
    a_low = budget.a_low
    log_pref = (math.log(2.0) + 0.5 * (alpha + beta) * math.log(alpha * beta)
                - math.lgamma(alpha) - math.lgamma(beta))
    hi = _tail_point(alpha, beta, a_low, log_pref)
    if hi <= a_low:
        return 0.0
    val, err, status = _psucc_adaptive(
        alpha, beta, alpha - beta, log_pref, 0.5 * (alpha + beta) - 1.0,
        budget.pt.vartheta, a_low, hi, cfg.relative_tolerance,
        cfg.absolute_tolerance, cfg.max_subdivisions)
    if status == 2 or not math.isfinite(val):
        raise QuadratureError("success-probability integrand was non-finite")
    if status == 1:
        raise QuadratureError(
            f"success-probability quadrature did not converge "
            f"(error estimate {err:.3e})")
    return min(max(val, 0.0), 1.0)


class MCEstimate(NamedTuple):
    p: float
    std_error: float
    n_samples: int


def prob_success_mc(budget: LinkBudget, n_samples: int = DEFAULT_MC_SAMPLES,
                    rng=0) -> MCEstimate:
    """Monte Carlo success probability from the raw channel samplers.

    Counts composite-gain draws clearing the threshold. The standard error
    uses the half-count-adjusted binomial estimate (k + 1/2)/(n + 1), which
    stays meaningful when no success or every success is observed.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    gen = as_generator(rng)
    alpha, beta = budget.turb.alpha, budget.turb.beta
    ha = gen.gamma(alpha, 1.0 / alpha, n_samples) * gen.gamma(beta, 1.0 / beta, n_samples)
    hg_frac = gen.random(n_samples) ** (1.0 / budget.pt.vartheta)  # = h_g / A0
    k = int(np.count_nonzero(ha * hg_frac > budget.a_low))
    p_hat = k / n_samples
    p_tilde = (k + 0.5) / (n_samples + 1.0)
    se = math.sqrt(p_tilde * (1.0 - p_tilde) / n_samples)
    return MCEstimate(p=p_hat, std_error=se, n_samples=n_samples)


def e2e_rate(p_succ: float, r_in: float) -> float:
    """Delivered entanglement rate P_succ * R_in [pairs/s]."""
    if not 0.0 <= p_succ <= 1.0:
        raise ValueError("p_succ must be in [0, 1]")
    if r_in < 0:
        raise ValueError("r_in must be nonnegative")
    return p_succ * r_in
