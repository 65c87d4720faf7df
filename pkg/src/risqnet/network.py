"""Multi-user network model: demands, feasibility, and fairness scoring.

A candidate operating point is a RIS position plus one generation rate
per user. Evaluating it walks the full pipeline per user: link budget ->
success probability -> delivered rate, and source state -> storage
depolarization -> turbulence phase damping -> delivered fidelity. The
result carries per-constraint flags so optimizers can distinguish "bad
objective" from "not allowed".
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

from .channel import EnvironmentParams, rytov_variance
from .entanglement import (ALPHA_MAX, ALPHA_MIN, MemoryParams, alpha_from_rate,
                           e2e_state, phase_damp_prob, rate_from_alpha,
                           storage_time, werner_from_alpha)
from .geometry import DeploymentRegion, NetworkLayout, Point3D, distance
from .link import build_link_budget, e2e_rate, prob_success
from .specfun.quadrature import QuadratureConfig

RATE_EPS = 1e-9  # tolerance for snapping rates onto the closed domain


@dataclass(frozen=True, slots=True)
class UserDemand:
    """Per-user service requirements."""

    weight: float = 1.0
    min_rate: float = 1.0        # delivered pairs/s
    min_fidelity: float = 0.0

    def __post_init__(self):
        if self.weight <= 0:
            raise ValueError("weight must be positive")
        if self.min_rate < 0:
            raise ValueError("min_rate must be nonnegative")
        if not 0.0 <= self.min_fidelity < 1.0:
            raise ValueError("min_fidelity must be in [0, 1)")


@dataclass(frozen=True, slots=True)
class ProblemInstance:
    """One deployment scenario to optimize over."""

    qbs: Point3D
    users: tuple[Point3D, ...]
    region: DeploymentRegion
    env: EnvironmentParams
    mem: MemoryParams
    demands: tuple[UserDemand, ...]
    fairness_threshold: float = 0.95
    separation_min: float = 20.0   # RIS-to-user clearance [m]
    phase_damp_distance: Literal["ris-user", "e2e"] = "ris-user"

    def __post_init__(self):
        if len(self.users) == 0:
            raise ValueError("at least one user is required")
        if len(self.demands) != len(self.users):
            raise ValueError("one demand per user is required")
        if not 0.0 <= self.fairness_threshold <= 1.0:
            raise ValueError("fairness_threshold must be in [0, 1]")
        if self.separation_min < 0:
            raise ValueError("separation_min must be nonnegative")
        if self.phase_damp_distance not in ("ris-user", "e2e"):
            raise ValueError("phase_damp_distance must be 'ris-user' or 'e2e'")

    @property
    def n_users(self) -> int:
        return len(self.users)

    def layout(self, ris: Point3D) -> NetworkLayout:
        return NetworkLayout(qbs=self.qbs, users=self.users, ris=ris)


@dataclass(frozen=True, slots=True)
class ConstraintFlags:
    """Which constraint families a candidate satisfies."""

    memory: bool
    min_rate: bool
    fairness: bool
    fidelity: bool
    region: bool
    separation: bool
    rate_domain: bool

    @property
    def all_ok(self) -> bool:
        return (self.memory and self.min_rate and self.fairness
                and self.fidelity and self.region and self.separation
                and self.rate_domain)

    def ok(self, relaxed: frozenset[str] = frozenset()) -> bool:
        """True if every non-relaxed constraint holds."""
        checks = {
            "memory": self.memory,
            "min_rate": self.min_rate,
            "fairness": self.fairness,
            "fidelity": self.fidelity,
            "region": self.region,
            "separation": self.separation,
            "rate_domain": self.rate_domain,
        }
        unknown = relaxed - checks.keys()
        if unknown:
            raise ValueError(f"unknown constraint names: {sorted(unknown)}")
        return all(v for k, v in checks.items() if k not in relaxed)


@dataclass(frozen=True, slots=True)
class AllocationSolution:
    """Fully evaluated candidate: RIS position plus per-user rates."""

    ris: Point3D
    rates_in: tuple[float, ...]
    p_succ: tuple[float, ...]
    rates_e2e: tuple[float, ...]
    fidelities: tuple[float, ...]
    wfi: float
    weighted_sum_rate: float
    flags: ConstraintFlags

    @property
    def feasible(self) -> bool:
        return self.flags.all_ok


def jfi(rates: Sequence[float]) -> float:
    """Jain fairness index of delivered rates; 1/N..1, or 0 if all zero."""
    total = math.fsum(rates)
    sq = math.fsum(r * r for r in rates)
    if sq == 0.0:
        return 0.0
    return total * total / (len(rates) * sq)


def wfi(rates: Sequence[float], weights: Sequence[float]) -> float:
    """Weighted fairness index: 1 when rates are proportional to weights."""
    if len(rates) != len(weights):
        raise ValueError("rates and weights must have equal length")
    if any(w <= 0.0 for w in weights):
        raise ValueError("weights must be positive")
    total = math.fsum(rates)
    sq = math.fsum(r * r / w for r, w in zip(rates, weights))
    if sq == 0.0:
        return 0.0
    return total * total / (math.fsum(weights) * sq)


def evaluate(instance: ProblemInstance, ris: Point3D,
             rates_in: Sequence[float],
             quad_cfg: QuadratureConfig | None = None) -> AllocationSolution:
    """Score one candidate and record its constraint status.

    Rates outside the source domain only trip the rate_domain flag; the
    physical quantities are computed at the clamped rate so optimizers
    still see a meaningful landscape near the boundary.
    """
    if len(rates_in) != instance.n_users:
        raise ValueError("one rate per user is required")
    layout = instance.layout(ris)

    rate_domain_ok = True
    p_succ = []
    rates_e2e = []
    fidelities = []
    for i, r_in in enumerate(rates_in):
        if r_in < rate_from_alpha(ALPHA_MIN) - RATE_EPS \
                or r_in > rate_from_alpha(ALPHA_MAX) + RATE_EPS:
            rate_domain_ok = False
        r_clamped = min(max(r_in, rate_from_alpha(ALPHA_MIN)),
                        rate_from_alpha(ALPHA_MAX))
        alpha_s = alpha_from_rate(r_clamped)
        budget = build_link_budget(instance.env, layout, i)
        p = prob_success(budget, quad_cfg)
        d_noise = (budget.d_ri if instance.phase_damp_distance == "ris-user"
                   else budget.d_e2e)
        state = e2e_state(
            werner_from_alpha(alpha_s),
            storage_time(budget.d_e2e, instance.mem),
            instance.mem,
            phase_damp_prob(rytov_variance(instance.env, d_noise)),
        )
        p_succ.append(p)
        rates_e2e.append(e2e_rate(p, r_clamped))
        fidelities.append(state.fidelity)

    weights = [d.weight for d in instance.demands]
    fairness = wfi(rates_e2e, weights)
    flags = ConstraintFlags(
        memory=math.fsum(rates_in) <= instance.mem.capacity,
        min_rate=all(r >= d.min_rate
                     for r, d in zip(rates_e2e, instance.demands)),
        fairness=fairness >= instance.fairness_threshold,
        fidelity=all(f >= d.min_fidelity
                     for f, d in zip(fidelities, instance.demands)),
        region=instance.region.contains(ris),
        separation=layout.min_ris_user_distance() >= instance.separation_min,
        rate_domain=rate_domain_ok,
    )
    return AllocationSolution(
        ris=ris,
        rates_in=tuple(float(r) for r in rates_in),
        p_succ=tuple(p_succ),
        rates_e2e=tuple(rates_e2e),
        fidelities=tuple(fidelities),
        wfi=fairness,
        weighted_sum_rate=math.fsum(w * r for w, r in zip(weights, rates_e2e)),
        flags=flags,
    )


def check_feasibility(instance: ProblemInstance, ris: Point3D,
                      rates_in: Sequence[float],
                      relaxed: frozenset[str] = frozenset(),
                      quad_cfg: QuadratureConfig | None = None) -> bool:
    return evaluate(instance, ris, rates_in, quad_cfg).flags.ok(relaxed)
