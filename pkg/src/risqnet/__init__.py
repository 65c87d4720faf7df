"""Entanglement distribution over RIS-assisted free-space optical links.

The package models the full pipeline of a single-hop quantum network:
atmospheric channel (attenuation, Gamma-Gamma turbulence, pointing
error), photon-delivery success probability, Bell-pair noise during
storage and transit, per-user rate/fidelity evaluation with fairness
constraints, and joint RIS-placement / rate-allocation optimization,
plus a reproducible experiment harness.
"""

from .channel import (EnvironmentParams, PointingParams, TurbulenceParams,
                      atmospheric_loss, gamma_gamma_pdf, make_environment,
                      pointing_cdf, pointing_params, pointing_pdf,
                      rytov_variance, sample_channel_gain, sample_pointing,
                      sample_turbulence, turbulence_params)
from .entanglement import (BellDiagonalState, MemoryParams, NoiseParams,
                           alpha_from_rate, depolarize, depolarize_strength,
                           e2e_state, phase_damp, phase_damp_prob,
                           rate_from_alpha, storage_time, werner,
                           werner_from_alpha)
from .geometry import (DeploymentRegion, NetworkLayout, Point3D, distance,
                       e2e_distance)
from .link import (LinkBudget, MCEstimate, budget_from_distances,
                   build_link_budget, e2e_rate, prob_success, prob_success_mc)
from .network import (AllocationSolution, ConstraintFlags, ProblemInstance,
                      UserDemand, check_feasibility, evaluate, jfi, wfi)
from .optimizer import (BudgetExceededError, ExhaustiveGrid, Framework,
                        InfeasibleError, OptimizerResult, SAConfig,
                        exhaustive_search, simulated_annealing, solve_baseline)
from .scenarios import (ResultTable, ScenarioConfig, UserSampler, emit_csv,
                        load_config, run_experiment, sample_user_layout)
from .specfun import QuadratureConfig, QuadratureError

__version__ = "0.1.0"

__all__ = [
    "AllocationSolution", "BellDiagonalState", "BudgetExceededError",
    "ConstraintFlags", "DeploymentRegion", "EnvironmentParams",
    "ExhaustiveGrid", "Framework", "InfeasibleError", "LinkBudget",
    "MCEstimate", "MemoryParams", "NetworkLayout", "NoiseParams",
    "OptimizerResult", "Point3D", "PointingParams", "ProblemInstance",
    "QuadratureConfig", "QuadratureError", "ResultTable", "SAConfig",
    "ScenarioConfig", "TurbulenceParams", "UserDemand", "UserSampler",
    "alpha_from_rate", "atmospheric_loss", "budget_from_distances",
    "build_link_budget", "check_feasibility", "depolarize",
    "depolarize_strength", "distance", "e2e_distance", "e2e_rate",
    "e2e_state", "emit_csv", "evaluate", "exhaustive_search",
    "gamma_gamma_pdf", "jfi", "load_config", "make_environment",
    "phase_damp", "phase_damp_prob", "pointing_cdf", "pointing_params",
    "pointing_pdf", "prob_success", "prob_success_mc", "rate_from_alpha",
    "run_experiment", "rytov_variance", "sample_channel_gain",
    "sample_pointing", "sample_turbulence", "sample_user_layout",
    "simulated_annealing", "solve_baseline", "storage_time",
    "turbulence_params", "werner", "werner_from_alpha", "wfi",
]
