"""Joint RIS-placement / rate-allocation optimization.

The decision vector is the RIS position plus one source rate per user.
The search engine is a single-chain simulated annealer with a hard
feasibility gate: candidates violating any active constraint are
rejected before the Metropolis test, so the chain only ever walks the
feasible region. An exhaustive grid search provides the optimality
reference, and the baseline frameworks reuse the same engine with
selected constraints switched off (and, for the log variant, a
different objective).

Success probabilities inside the search are always the deterministic
quadrature values; Monte Carlo stays on the validation side only.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .channel import rytov_variance
from .entanglement import (RATE_MAX, RATE_MIN, alpha_from_rate, e2e_state,
                           phase_damp_prob, storage_time, werner_from_alpha)
from .geometry import Point3D, distance
from .link import budget_from_distances, prob_success
from .network import AllocationSolution, ProblemInstance, evaluate
from .rng import as_generator
from .specfun.quadrature import QuadratureConfig


class InfeasibleError(RuntimeError):
    """No feasible solution was found within the allotted attempts."""


class BudgetExceededError(RuntimeError):
    """The requested exhaustive grid is larger than the evaluation budget."""


class Framework(Enum):
    """Optimization frameworks: which constraints are active, and how
    delivered rates are scored."""

    PROPOSED = "proposed"
    RATE_MAX = "rate-max"           # fairness constraint off
    LOG_RATE_MAX = "log-rate-max"   # fairness + min-rate off, log objective
    FA = "fidelity-agnostic"        # fidelity constraint off
    FFA = "fidelity-fairness-agnostic"  # fidelity + fairness off

    @property
    def relaxed(self) -> frozenset[str]:
        return _RELAXED[self]


_RELAXED: dict[Framework, frozenset[str]] = {
    Framework.PROPOSED: frozenset(),
    Framework.RATE_MAX: frozenset({"fairness"}),
    Framework.LOG_RATE_MAX: frozenset({"fairness", "min_rate"}),
    Framework.FA: frozenset({"fidelity"}),
    Framework.FFA: frozenset({"fairness", "fidelity"}),
}


@dataclass(frozen=True, slots=True)
class SAConfig:
    """Annealing schedule and move sizes.

    Temperatures are on a normalized energy scale: raw objectives are
    divided by the magnitude of the initial solution's objective, so
    t0 = 1.0 means "initial-energy-sized uphill moves are easy".
    """

    t0: float = 1.0
    t_min: float = 1e-4
    cooling: float = 0.95
    iters_per_temp: int = 200
    neighbor_step_pos: float = 40.0    # [m], per axis
    neighbor_step_rate: float = 1e5    # [pairs/s], one coordinate per move
    seed: int = 0
    energy: str = "weighted-sum-rate"  # or "wfi"
    restarts: int = 50                 # feasible-initialization attempts

    def __post_init__(self):
        if not self.t0 > self.t_min > 0:
            raise ValueError("need t0 > t_min > 0")
        if not 0.0 < self.cooling < 1.0:
            raise ValueError("cooling must be in (0, 1)")
        if self.iters_per_temp < 1:
            raise ValueError("iters_per_temp must be >= 1")
        if self.neighbor_step_pos <= 0 or self.neighbor_step_rate <= 0:
            raise ValueError("neighbor steps must be positive")
        if self.energy not in ("weighted-sum-rate", "wfi"):
            raise ValueError("energy must be 'weighted-sum-rate' or 'wfi'")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")


@dataclass(frozen=True, slots=True)
class TraceEntry:
    """Per-temperature-level search statistics."""

    temperature: float
    best_objective: float
    proposals: int
    feasible_proposals: int
    accepted: int
    downhill_proposed: int
    downhill_accepted: int


@dataclass(frozen=True, slots=True)
class OptimizerResult:
    best: AllocationSolution
    trace: tuple[TraceEntry, ...]
    evaluations: int


@dataclass(frozen=True, slots=True)
class ExhaustiveGrid:
    """Cartesian resolution of the reference search."""

    nx: int = 10
    ny: int = 10
    nh: int = 4
    rate_levels: int = 8

    def __post_init__(self):
        for n in (self.nx, self.ny, self.nh, self.rate_levels):
            if n < 1:
                raise ValueError("grid resolutions must be >= 1")


def _log_sum_rate(sol: AllocationSolution, weights: list[float]) -> float:
    total = 0.0
    for w, r in zip(weights, sol.rates_e2e):
        total += w * math.log(r) if r > 0.0 else -math.inf
    return total


def _energy_fn(framework: Framework, cfg: SAConfig,
               instance: ProblemInstance) -> Callable[[AllocationSolution], float]:
    if framework is Framework.LOG_RATE_MAX:
        weights = [d.weight for d in instance.demands]
        return lambda sol: _log_sum_rate(sol, weights)
    if cfg.energy == "wfi":
        return lambda sol: sol.wfi
    return lambda sol: sol.weighted_sum_rate


def _axis_values(lo: float, hi: float, n: int) -> np.ndarray:
    if n == 1:
        return np.array([0.5 * (lo + hi)])
    return np.linspace(lo, hi, n)


def _random_point(instance: ProblemInstance, gen: np.random.Generator) -> Point3D:
    reg = instance.region
    return Point3D(
        x=gen.uniform(reg.x_min, reg.x_max),
        y=gen.uniform(reg.y_min, reg.y_max),
        h=gen.uniform(reg.h_min, reg.h_max),
    )


def _seed_rates(instance: ProblemInstance, ris: Point3D,
                relaxed: frozenset[str], gen: np.random.Generator,
                quad_cfg: QuadratureConfig | None) -> list[float] | None:
    """Weight-proportional delivered-rate seeding.

    Picks r_in,i = c * w_i / p_i so delivered rates land proportional to
    weights (WFI = 1 by construction), with c drawn uniformly from the
    interval that keeps every rate in its source domain, respects the
    memory budget, and (when active) clears the per-user floors. The
    linear draw keeps starts at a scale where the fixed additive rate
    steps can still move without tripping the fairness gate. Returns
    None when the interval is empty at this position.
    """
    d_sr = distance(instance.qbs, ris)
    p = []
    for user in instance.users:
        budget = budget_from_distances(instance.env, d_sr, distance(ris, user))
        p.append(prob_success(budget, quad_cfg))
    if min(p) <= 0.0:
        return None
    weights = [d.weight for d in instance.demands]
    c_lo = max(RATE_MIN * pi / wi for pi, wi in zip(p, weights))
    if "min_rate" not in relaxed:
        c_lo = max(c_lo, max(d.min_rate / wi
                             for d, wi in zip(instance.demands, weights)))
    c_hi = min(RATE_MAX * pi / wi for pi, wi in zip(p, weights))
    if "memory" not in relaxed:
        c_hi = min(c_hi, instance.mem.capacity
                   / math.fsum(wi / pi for wi, pi in zip(weights, p)))
    if c_lo > c_hi:
        return None
    c = c_lo + (c_hi - c_lo) * gen.random()
    return [c * wi / pi for wi, pi in zip(weights, p)]


def _initialize(instance: ProblemInstance, cfg: SAConfig,
                relaxed: frozenset[str], gen: np.random.Generator,
                quad_cfg: QuadratureConfig | None) -> tuple[AllocationSolution, int]:
    evals = 0
    for _ in range(cfg.restarts):
        ris = _random_point(instance, gen)
        if instance.layout(ris).min_ris_user_distance() < instance.separation_min:
            continue
        rates = _seed_rates(instance, ris, relaxed, gen, quad_cfg)
        if rates is None:
            continue
        sol = evaluate(instance, ris, rates, quad_cfg)
        evals += 1
        if sol.flags.ok(relaxed):
            return sol, evals
    raise InfeasibleError(
        f"no feasible starting point in {cfg.restarts} attempts")


def _neighbor(instance: ProblemInstance, sol: AllocationSolution,
              cfg: SAConfig, gen: np.random.Generator) -> tuple[Point3D, list[float]]:
    reg = instance.region
    ris = Point3D(
        x=min(max(sol.ris.x + gen.uniform(-1.0, 1.0) * cfg.neighbor_step_pos,
                  reg.x_min), reg.x_max),
        y=min(max(sol.ris.y + gen.uniform(-1.0, 1.0) * cfg.neighbor_step_pos,
                  reg.y_min), reg.y_max),
        h=min(max(sol.ris.h + gen.uniform(-1.0, 1.0) * cfg.neighbor_step_pos,
                  reg.h_min), reg.h_max),
    )
    rates = list(sol.rates_in)
    i = int(gen.integers(len(rates)))
    rates[i] = min(max(rates[i] + gen.uniform(-1.0, 1.0) * cfg.neighbor_step_rate,
                       RATE_MIN), RATE_MAX)
    return ris, rates


def simulated_annealing(instance: ProblemInstance, cfg: SAConfig | None = None,
                        framework: Framework = Framework.PROPOSED,
                        quad_cfg: QuadratureConfig | None = None) -> OptimizerResult:
    """Anneal the joint placement/allocation problem.

    Infeasible proposals (under the framework's active constraints) are
    rejected before the Metropolis test; improvements are always taken;
    degradations pass with probability exp(dU / T) on the normalized
    energy scale. Deterministic for a given config seed.
    """
    cfg = cfg or SAConfig()
    relaxed = framework.relaxed
    energy_of = _energy_fn(framework, cfg, instance)
    gen = as_generator(cfg.seed)

    current, evals = _initialize(instance, cfg, relaxed, gen, quad_cfg)
    scale = abs(energy_of(current))
    if not (math.isfinite(scale) and scale > 1e-300):
        scale = 1.0
    cur_u = energy_of(current) / scale
    best, best_u = current, cur_u

    trace: list[TraceEntry] = []
    temp = cfg.t0
    while temp > cfg.t_min:
        proposals = feasible = accepted = down_prop = down_acc = 0
        for _ in range(cfg.iters_per_temp):
            ris, rates = _neighbor(instance, current, cfg, gen)
            cand = evaluate(instance, ris, rates, quad_cfg)
            evals += 1
            proposals += 1
            r = gen.random()  # drawn unconditionally to keep the stream aligned
            if not cand.flags.ok(relaxed):
                continue
            feasible += 1
            cand_u = energy_of(cand) / scale
            du = cand_u - cur_u
            if du <= 0:
                down_prop += 1
            if du > 0 or math.exp(du / temp) > r:
                accepted += 1
                if du <= 0:
                    down_acc += 1
                current, cur_u = cand, cand_u
                if cur_u > best_u:
                    best, best_u = current, cur_u
        trace.append(TraceEntry(
            temperature=temp,
            best_objective=energy_of(best),
            proposals=proposals,
            feasible_proposals=feasible,
            accepted=accepted,
            downhill_proposed=down_prop,
            downhill_accepted=down_acc,
        ))
        temp *= cfg.cooling
    return OptimizerResult(best=best, trace=tuple(trace), evaluations=evals)


def solve_baseline(instance: ProblemInstance, framework: Framework,
                   cfg: SAConfig | None = None,
                   quad_cfg: QuadratureConfig | None = None) -> AllocationSolution:
    """Best solution of one framework; same engine, adjusted constraints."""
    return simulated_annealing(instance, cfg, framework, quad_cfg).best


def exhaustive_search(instance: ProblemInstance, grid: ExhaustiveGrid,
                      relaxed: frozenset[str] = frozenset(),
                      max_evaluations: int = 5_000_000,
                      quad_cfg: QuadratureConfig | None = None) -> AllocationSolution:
    """Reference optimum over a Cartesian grid of positions and rates.

    Success probabilities are computed once per (position, user); the
    rate combinations are then scanned vectorized. Ties are broken by
    the first candidate in lexicographic grid order (positions outermost,
    then the first user's rate level slowest).
    """
    n = instance.n_users
    reg = instance.region
    xs = _axis_values(reg.x_min, reg.x_max, grid.nx)
    ys = _axis_values(reg.y_min, reg.y_max, grid.ny)
    hs = _axis_values(reg.h_min, reg.h_max, grid.nh)
    levels = np.linspace(RATE_MIN, RATE_MAX, grid.rate_levels)
    n_combos = grid.rate_levels ** n
    total = grid.nx * grid.ny * grid.nh * n_combos
    if total > max_evaluations:
        raise BudgetExceededError(
            f"grid requires {total} evaluations, budget is {max_evaluations}")

    weights = np.array([d.weight for d in instance.demands])
    min_rates = np.array([d.min_rate for d in instance.demands])
    min_fids = np.array([d.min_fidelity for d in instance.demands])
    idx = np.stack(np.meshgrid(*([np.arange(grid.rate_levels)] * n),
                               indexing="ij"), axis=-1).reshape(-1, n)
    r_in_c = levels[idx]                        # (combos, users)
    sum_in = r_in_c.sum(axis=1)
    alphas = [alpha_from_rate(r) for r in levels]

    check_memory = "memory" not in relaxed
    check_min_rate = "min_rate" not in relaxed
    check_fairness = "fairness" not in relaxed
    check_fidelity = "fidelity" not in relaxed

    best_obj = -math.inf
    best_pos: Point3D | None = None
    best_rates: np.ndarray | None = None
    for x, y, h in itertools.product(xs, ys, hs):
        pos = Point3D(x=float(x), y=float(y), h=float(h))
        layout = instance.layout(pos)
        if layout.min_ris_user_distance() < instance.separation_min:
            continue
        d_sr = distance(instance.qbs, pos)
        p = np.empty(n)
        fid = np.empty((n, grid.rate_levels))
        for u, user in enumerate(instance.users):
            d_ri = distance(pos, user)
            budget = budget_from_distances(instance.env, d_sr, d_ri)
            p[u] = prob_success(budget, quad_cfg)
            t = storage_time(budget.d_e2e, instance.mem)
            d_noise = (d_ri if instance.phase_damp_distance == "ris-user"
                       else budget.d_e2e)
            p2 = phase_damp_prob(rytov_variance(instance.env, d_noise))
            for l, a_s in enumerate(alphas):
                fid[u, l] = e2e_state(werner_from_alpha(a_s), t,
                                      instance.mem, p2).fidelity

        r_e2e_c = r_in_c * p                    # (combos, users)
        obj = r_e2e_c @ weights
        mask = np.ones(len(idx), dtype=bool)
        if check_memory:
            mask &= sum_in <= instance.mem.capacity
        if check_min_rate:
            mask &= (r_e2e_c >= min_rates).all(axis=1)
        if check_fairness:
            tot = r_e2e_c.sum(axis=1)
            sq = (r_e2e_c * r_e2e_c / weights).sum(axis=1)
            with np.errstate(invalid="ignore", divide="ignore"):
                wfi_c = np.where(sq > 0.0, tot * tot / (weights.sum() * sq), 0.0)
            mask &= wfi_c >= instance.fairness_threshold
        if check_fidelity:
            fid_c = fid[np.arange(n), idx]      # (combos, users)
            mask &= (fid_c >= min_fids).all(axis=1)
        if not mask.any():
            continue
        cand = np.flatnonzero(mask)
        j = cand[np.argmax(obj[cand])]          # argmax keeps first maximum
        if obj[j] > best_obj:
            best_obj = float(obj[j])
            best_pos = pos
            best_rates = r_in_c[j]

    if best_pos is None:
        raise InfeasibleError("no feasible grid point")
    return evaluate(instance, best_pos, [float(r) for r in best_rates], quad_cfg)
