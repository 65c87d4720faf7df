"""Command-line front end.

Subcommands map onto the library layers: point evaluations (psucc,
fidelity, evaluate), a single optimization run (optimize), and the
named experiment families (experiment). Everything is driven by an INI
scenario file plus a seed, and CSV artifacts are byte-stable for a
given (config, seed) pair.

Exit codes: 0 success, 1 usage/config error, 2 infeasible scenario,
3 numeric failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .network import evaluate
from .optimizer import Framework, InfeasibleError, simulated_annealing
from .rng import derive_seed
from .scenarios import (EXPERIMENT_NAMES, ExperimentResult, ResultTable,
                        ScenarioConfig, emit_csv, load_config, run_experiment,
                        _solution_rows)
from .specfun.quadrature import QuadratureError

_FRAMEWORK_ALIASES = {
    "proposed": Framework.PROPOSED,
    "rate-max": Framework.RATE_MAX,
    "log-rate-max": Framework.LOG_RATE_MAX,
    "fa": Framework.FA,
    "fidelity-agnostic": Framework.FA,
    "ffa": Framework.FFA,
    "fidelity-fairness-agnostic": Framework.FFA,
}

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_NUMERIC = 3


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage failures exit with code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="risqnet",
                     description="RIS-assisted entanglement network toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
            ("psucc", "per-user photon-delivery success probability"),
            ("fidelity", "per-user delivered fidelity"),
            ("evaluate", "full constraint evaluation of a candidate"),
            ("optimize", "simulated-annealing optimization run"),
            ("experiment", "named experiment family")):
        p = sub.add_parser(name, help=text)
        if name == "experiment":
            p.add_argument("name", choices=EXPERIMENT_NAMES)
        p.add_argument("--config", help="scenario INI file")
        p.add_argument("--seed", type=int, help="override the scenario seed")
        p.add_argument("--out", help="CSV output path")
        p.add_argument("--reps", type=int, help="repetition count")
        p.add_argument("--framework", choices=sorted(_FRAMEWORK_ALIASES),
                       help="override the scenario framework")
    return parser


def _load(args) -> ScenarioConfig:
    cfg = load_config(args.config) if args.config else ScenarioConfig()
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.framework is not None:
        cfg = replace(cfg, framework=args.framework)
    return cfg


def _framework(cfg: ScenarioConfig) -> Framework:
    try:
        return _FRAMEWORK_ALIASES[cfg.framework]
    except KeyError:
        raise ValueError(
            f"unknown framework {cfg.framework!r}; "
            f"choose from {sorted(_FRAMEWORK_ALIASES)}") from None


def _candidate_solution(cfg: ScenarioConfig):
    if cfg.ris is None:
        raise ValueError("this command needs a [ris] section in the config")
    instance = cfg.build_instance()
    rates = cfg.resolve_rates(instance.n_users)
    return instance, evaluate(instance, cfg.ris, rates)


def _emit_solution(args, cfg: ScenarioConfig, command: str, instance,
                   sol) -> None:
    if not args.out:
        return
    table = ResultTable()
    _solution_rows(table, dict(experiment=command, seed=cfg.seed, rep=0,
                               variant="", framework=cfg.framework,
                               weather=cfg.weather, turbulence=cfg.turbulence,
                               pointing=cfg.pointing),
                   instance, sol)
    emit_csv(table, args.out)


def _cmd_psucc(args) -> int:
    cfg = _load(args)
    instance, sol = _candidate_solution(cfg)
    for i, p in enumerate(sol.p_succ):
        print(f"user {i}: p_succ = {p:.6e}")
    _emit_solution(args, cfg, "psucc", instance, sol)
    return EXIT_OK


def _cmd_fidelity(args) -> int:
    cfg = _load(args)
    instance, sol = _candidate_solution(cfg)
    for i, f in enumerate(sol.fidelities):
        print(f"user {i}: fidelity = {f:.6f}")
    _emit_solution(args, cfg, "fidelity", instance, sol)
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    cfg = _load(args)
    instance, sol = _candidate_solution(cfg)
    for i in range(instance.n_users):
        print(f"user {i}: r_in = {sol.rates_in[i]:.6e}  "
              f"p_succ = {sol.p_succ[i]:.6e}  "
              f"r_e2e = {sol.rates_e2e[i]:.6e}  "
              f"fidelity = {sol.fidelities[i]:.6f}")
    print(f"wfi = {sol.wfi:.6f}  objective = {sol.weighted_sum_rate:.6e}")
    flags = sol.flags
    print("feasible =", sol.feasible,
          f"(memory={flags.memory} min_rate={flags.min_rate} "
          f"fairness={flags.fairness} fidelity={flags.fidelity} "
          f"region={flags.region} separation={flags.separation} "
          f"rate_domain={flags.rate_domain})")
    _emit_solution(args, cfg, "evaluate", instance, sol)
    return EXIT_OK


def _cmd_optimize(args) -> int:
    cfg = _load(args)
    framework = _framework(cfg)
    instance = cfg.build_instance()
    sa = cfg.sa_config(seed=derive_seed(cfg.seed))
    result = simulated_annealing(instance, sa, framework)
    sol = result.best
    print(f"framework = {framework.value}")
    print(f"ris = ({sol.ris.x:.3f}, {sol.ris.y:.3f}, {sol.ris.h:.3f})")
    for i in range(instance.n_users):
        print(f"user {i}: r_in = {sol.rates_in[i]:.6e}  "
              f"r_e2e = {sol.rates_e2e[i]:.6e}  "
              f"fidelity = {sol.fidelities[i]:.6f}")
    print(f"wfi = {sol.wfi:.6f}  objective = {sol.weighted_sum_rate:.6e}  "
          f"evaluations = {result.evaluations}")
    _emit_solution(args, cfg, "optimize", instance, sol)
    return EXIT_OK


def _cmd_experiment(args) -> int:
    cfg = _load(args)
    result: ExperimentResult = run_experiment(args.name, cfg, reps=args.reps)
    out = args.out or f"{args.name}.csv"
    emit_csv(result.table, out)
    print(f"experiment = {args.name}  rows = {len(result.table)}  out = {out}")
    for key in sorted(result.summary):
        print(f"{key} = {result.summary[key]}")
    flags = [v for v in result.table.column("feasible") if v != ""]
    if flags and not any(flags):
        print("every repetition was infeasible", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


_COMMANDS = {
    "psucc": _cmd_psucc,
    "fidelity": _cmd_fidelity,
    "evaluate": _cmd_evaluate,
    "optimize": _cmd_optimize,
    "experiment": _cmd_experiment,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except QuadratureError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
