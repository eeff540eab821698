"""Command-line entry point.

One subcommand per experiment kind, plus `lpp-exact` for evaluating the
closed-form shape functions.  Exit codes: 0 success, 2 configuration error,
3 hard failure (budget exceeded, unresolved truncation, or verification
mismatch).
"""

from __future__ import annotations

import argparse
import sys

from .experiments import KINDS, ConfigError, ExperimentConfig, HardFailure, run_experiment
from .lpp import ExactShape, exact_g
from .oracle import BudgetExceeded


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value config file; flags override it")
    p.add_argument("--dist", help="distribution token, e.g. exp:1.0 or unif:0.5:1.5")
    p.add_argument("--dim", type=int, help="lattice dimension")
    p.add_argument("--model", choices=("fpp", "lpp"), help="model for radial-g")
    p.add_argument("--direction", help="direction vector, e.g. 1,1")
    p.add_argument("--n-grid", dest="n_grid", help="comma-separated n values")
    p.add_argument("--t", type=float, help="ball time for shape estimates")
    p.add_argument("--trials", type=int, help="Monte Carlo trials")
    p.add_argument("--steps", type=int, help="growth steps / particles / table size")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--workers", type=int, help="parallel workers")
    p.add_argument("--out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latticegrow",
        description="Simulation and estimation for lattice random growth models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for kind in KINDS:
        p = sub.add_parser(kind, help=f"run a {kind} experiment")
        _add_common(p)

    pe = sub.add_parser("lpp-exact", help="evaluate a closed-form limit shape")
    pe.add_argument("--model", choices=("exp", "geom"), required=True)
    pe.add_argument("--p", type=float, help="success probability for geom")
    pe.add_argument("--x", required=True, help="evaluation point, e.g. 1,1")
    return parser


def _config_from_args(args) -> ExperimentConfig:
    if args.config:
        with open(args.config) as fh:
            cfg = ExperimentConfig.from_text(fh.read())
    else:
        cfg = ExperimentConfig()
    cfg.kind = args.command
    for key in ("dist", "dim", "model", "direction", "n_grid", "t", "trials",
                "steps", "seed", "workers", "out"):
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, key, val)
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "lpp-exact":
        try:
            point = tuple(float(v) for v in args.x.split(","))
            if args.model == "exp":
                shape = ExactShape("exponential")
            else:
                if args.p is None:
                    raise ValueError("geom shape needs --p")
                shape = ExactShape("geometric", p=args.p)
            value = exact_g(shape, point)
        except ValueError as e:
            print(f"config error: {e}", file=sys.stderr)
            return 2
        print(format(value, ".17g"))
        return 0

    try:
        cfg = _config_from_args(args)
        summary = run_experiment(cfg)
    except (ConfigError, OSError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except (HardFailure, BudgetExceeded) as e:
        print(f"hard failure: {e}", file=sys.stderr)
        return 3
    for name in summary["files"]:
        print(f"wrote {cfg.out}/{name}")
    print(f"wrote {cfg.out}/summary.json")
    return 0


if __name__ == "__main__":
    sys.exit(main())
