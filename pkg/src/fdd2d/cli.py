"""Command-line interface.

    fdd2d simulate --scenario fig2 --out results/ --seed 7 [--workers 4]
    fdd2d analytic --set n=500 --set l_km=0.2

Exit codes: 0 success, 2 configuration/usage error, 3 infeasible placement.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

import numpy as np

from .analytic import collaboration_probabilities, placement_rho_profile
from .config import ConfigError, ScenarioConfig, parse_config_file, parse_overrides, validate
from .harness import SCENARIOS, run_scenario, scenario_runs
from .placement import InfeasiblePlacementError
from .popularity import build_library
from .results import plot_results, write_results

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fdd2d",
        description="FD-D2D video delivery: Monte-Carlo simulator and "
                    "closed-form collaboration probabilities",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a scenario sweep and write CSV results")
    sim.add_argument("--scenario", required=True,
                     help=f"one of: {', '.join(sorted(SCENARIOS))}")
    sim.add_argument("--config", help="key=value config file")
    sim.add_argument("--set", dest="sets", action="append", default=[],
                     metavar="KEY=VALUE", help="override one config key")
    sim.add_argument("--out", required=True, help="output directory for CSV/plots")
    sim.add_argument("--seed", type=int, help="master seed (overrides config)")
    sim.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    sim.add_argument("--plot", action="store_true", help="write one SVG per metric")

    ana = sub.add_parser("analytic", help="print closed-form collaboration probabilities")
    ana.add_argument("--config", help="key=value config file")
    ana.add_argument("--set", dest="sets", action="append", default=[],
                     metavar="KEY=VALUE", help="override one config key")
    return parser


def _gather_settings(args) -> tuple[dict, dict]:
    file_settings = parse_config_file(args.config) if args.config else {}
    overrides = parse_overrides(args.sets)
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    return file_settings, overrides


def cmd_simulate(args) -> int:
    file_settings, overrides = _gather_settings(args)
    runs = scenario_runs(args.scenario, file_settings, overrides)
    os.makedirs(args.out, exist_ok=True)
    for label, cfg, metrics in runs:
        validate(cfg)
        table = run_scenario(cfg, metrics=metrics, workers=args.workers)
        csv_path = os.path.join(args.out, f"{label}.csv")
        write_results(table, csv_path)
        print(f"wrote {csv_path}")
        if args.plot:
            for path in plot_results(table, args.out, label):
                print(f"wrote {path}")
    return EXIT_OK


def cmd_analytic(args) -> int:
    file_settings, overrides = _gather_settings(args)
    cfg = ScenarioConfig()
    for settings in (file_settings, overrides):
        cfg = dataclasses.replace(cfg, **settings)
    validate(cfg, require_seed=False)
    # popularity masses only depend on the pmf; file sizes are irrelevant here
    library = build_library(cfg.m, cfg.gamma_r, np.random.default_rng(0),
                            cfg.file_min_mb, cfg.file_max_mb)
    profile = placement_rho_profile(library, cfg.h)
    sweep_var = cfg.sweep or "l_km"
    print(f"# n={cfg.n} h={cfg.h} m={cfg.m} gamma_r={cfg.gamma_r} a_km={cfg.a_km}")
    print(f"{sweep_var}\tP_FD\tP_HD\tP_self")
    for value in cfg.sweep_values():
        point = cfg.at_sweep_point(value)
        ratio = point.l_km**2 / (2.0 * point.a_km**2)
        hd, fd, self_ = collaboration_probabilities(point.n, ratio, profile)
        print(f"{value:.9g}\t{fd:.9g}\t{hd:.9g}\t{self_:.9g}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            return cmd_simulate(args)
        return cmd_analytic(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasiblePlacementError as exc:
        print(f"infeasible placement: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
