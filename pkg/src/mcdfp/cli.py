"""Command-line surface: `run` a batch, `sweep` parameter cells, inspect the
game `oracle`. Exit codes: 0 success, 2 bad input/config, 3 output I/O failure."""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

from .config import ConfigError, load_config_file, preset_config
from .engine import (
    DEFAULT_SWEEP_CELLS,
    Variant,
    parameter_sweep,
    run_batch,
)
from .game import (
    ENUMERATION_LIMIT,
    assignment_cost,
    cost_matrix,
    enumerate_pure_ne,
    optimal_assignment,
)
from .output import write_run_outputs, write_summary_json


def _add_scenario_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=["scenario1", "scenario2"], help="built-in scenario")
    src.add_argument("--config", type=Path, help="scenario file (YAML or JSON)")


def _resolve_config(args: argparse.Namespace):
    """Build the scenario from preset/file plus flag overrides.

    MCDFP_SEED in the environment overrides any --seed flag or file value.
    """
    seed = getattr(args, "seed", None)
    env_seed = os.environ.get("MCDFP_SEED")
    if env_seed is not None:
        try:
            seed = int(env_seed)
        except ValueError:
            raise ConfigError(f"MCDFP_SEED must be an integer, got {env_seed!r}")

    overrides = {
        "variant": getattr(args, "variant", None),
        "alpha": getattr(args, "alpha", None),
        "seed": seed,
        "replications": getattr(args, "reps", None),
        "horizon": getattr(args, "horizon", None),
    }
    if args.preset:
        return preset_config(args.preset, **overrides)
    config = load_config_file(args.config)
    changes = {}
    if overrides["variant"] is not None:
        changes["variant"] = Variant(overrides["variant"])
    if overrides["seed"] is not None:
        changes["seed"] = overrides["seed"]
    if overrides["replications"] is not None:
        changes["replications"] = overrides["replications"]
    if overrides["horizon"] is not None:
        changes["horizon"] = overrides["horizon"]
    if overrides["alpha"] is not None:
        changes["mobility"] = dataclasses.replace(config.mobility, alpha=overrides["alpha"])
    try:
        return dataclasses.replace(config, **changes) if changes else config
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def cmd_run(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    batch = run_batch(config, max_workers=args.threads)
    write_run_outputs(args.out, config, batch)
    s = batch.summary
    print(
        f"{config.variant.value}: coverage_rate={s.coverage_rate:.3f} "
        f"convergence_rate={s.convergence_rate:.3f} "
        f"mean_converged_at={s.mean_converged_at} total_attempts={s.total_attempts}"
    )
    return 0


def _parse_cell(text: str) -> tuple[float, float, float, float]:
    parts = text.split(",")
    if len(parts) != 4:
        raise ConfigError(f"sweep cell must be rho1,rho2,eta1,eta2 — got {text!r}")
    try:
        rho1, rho2, eta1, eta2 = (float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"sweep cell must contain four numbers, got {text!r}")
    return rho1, rho2, eta1, eta2


def cmd_sweep(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    cells = tuple(_parse_cell(c) for c in args.cells) if args.cells else DEFAULT_SWEEP_CELLS
    out_root = Path(args.out)
    results = parameter_sweep(config, cells, max_workers=args.threads)
    for i, cell in enumerate(results):
        name = f"cell{i:02d}_rho1-{cell.rho1:g}_rho2-{cell.rho2:g}_eta1-{cell.eta1:g}_eta2-{cell.eta2:g}"
        cell_dir = out_root / name
        cell_cfg = dataclasses.replace(
            config,
            learn=dataclasses.replace(config.learn, rho1=cell.rho1, rho2=cell.rho2),
            comm=dataclasses.replace(config.comm, eta1=cell.eta1, eta2=cell.eta2),
        )
        write_run_outputs(cell_dir, cell_cfg, cell.batch)
        with open(cell_dir / "cell.json", "w") as fh:
            json.dump(
                {"rho1": cell.rho1, "rho2": cell.rho2, "eta1": cell.eta1, "eta2": cell.eta2},
                fh,
                indent=2,
                sort_keys=True,
            )
            fh.write("\n")
        s = cell.batch.summary
        print(f"{name}: convergence_rate={s.convergence_rate:.3f} total_attempts={s.total_attempts}")
    return 0


def cmd_oracle(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    n = config.n
    if n > ENUMERATION_LIMIT:
        print(f"error: equilibrium enumeration supports N <= {ENUMERATION_LIMIT}, got N = {n}", file=sys.stderr)
        return 2
    costs = cost_matrix(config.robot_starts, config.targets)
    equilibria = enumerate_pure_ne(costs)
    opt_profile, opt_cost = optimal_assignment(costs)
    if args.json:
        doc = {
            "n": n,
            "optimal": {"actions": list(opt_profile), "cost": opt_cost},
            "pure_ne": [
                {"actions": list(p), "cost": assignment_cost(p, costs)} for p in equilibria
            ],
        }
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print(f"robots/targets: {n}")
        print(f"optimal assignment: {';'.join(map(str, opt_profile))}  cost={opt_cost!r}")
        print(f"pure Nash equilibria: {len(equilibria)}")
        print("actions        cost")
        for profile in equilibria:
            print(f"{';'.join(map(str, profile)):<14} {assignment_cost(profile, costs)!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mcdfp",
        description="Simulate decentralized fictitious play for multi-robot target assignment.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one replication batch and write metrics")
    _add_scenario_args(run_p)
    run_p.add_argument("--variant", choices=[v.value for v in Variant], default=None)
    run_p.add_argument("--alpha", type=float, default=None, help="robot speed per step")
    run_p.add_argument("--seed", type=int, default=None)
    run_p.add_argument("--reps", type=int, default=None, help="number of replications")
    run_p.add_argument("--horizon", type=int, default=None, help="final time")
    run_p.add_argument("--threads", type=int, default=1, help="replication worker processes")
    run_p.add_argument("--out", type=Path, required=True, help="output directory")
    run_p.set_defaults(func=cmd_run)

    sweep_p = sub.add_parser("sweep", help="run a (rho1,rho2,eta1,eta2) parameter sweep")
    _add_scenario_args(sweep_p)
    sweep_p.add_argument(
        "--cells",
        nargs="+",
        default=None,
        help="cells as rho1,rho2,eta1,eta2 quadruples (default: the standard four)",
    )
    sweep_p.add_argument("--variant", choices=[v.value for v in Variant], default=None)
    sweep_p.add_argument("--alpha", type=float, default=None)
    sweep_p.add_argument("--seed", type=int, default=None)
    sweep_p.add_argument("--reps", type=int, default=20, help="replications per cell")
    sweep_p.add_argument("--horizon", type=int, default=None)
    sweep_p.add_argument("--threads", type=int, default=1)
    sweep_p.add_argument("--out", type=Path, required=True)
    sweep_p.set_defaults(func=cmd_sweep)

    oracle_p = sub.add_parser("oracle", help="enumerate pure equilibria and the optimal assignment")
    _add_scenario_args(oracle_p)
    oracle_p.add_argument("--json", action="store_true", help="machine-readable output")
    oracle_p.set_defaults(func=cmd_oracle)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
