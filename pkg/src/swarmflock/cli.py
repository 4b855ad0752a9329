"""Command-line interface.

Subcommands: simulate, sweep, classify, plot.  Exit codes: 0 success,
2 configuration/usage error, 3 solver abort.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .integrators import SolverError
from .io import read_trajectory
from .observables import ClassifierThresholds, classify, default_thresholds
from .plots import MODES, render_scatter
from .simulate import run_config
from .sweep import run_sweep, write_sweep_table

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3


def _common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--out-dir", type=Path, default=Path("."), help="output directory")
    parser.add_argument("--workers", type=int, default=1, help="parallel runs (sweep)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarmflock",
        description="Swarming-oscillator simulations: clustering, flocking, "
        "and synchronization.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one configured simulation")
    p_sim.add_argument("config", type=Path, help="JSON config file")
    _common_flags(p_sim)

    p_sweep = sub.add_parser("sweep", help="run a parameter grid")
    p_sweep.add_argument("config", type=Path, help="JSON config file with a sweep section")
    _common_flags(p_sweep)

    p_cls = sub.add_parser("classify", help="label an exported trajectory")
    p_cls.add_argument("trajectory", type=Path, help="trajectory CSV (with sidecar)")
    p_cls.add_argument("--window", type=float, default=None, help="tail window, time units")
    _common_flags(p_cls)

    p_plot = sub.add_parser("plot", help="render an SVG scatter plot")
    p_plot.add_argument("trajectory", type=Path, help="trajectory CSV (with sidecar)")
    p_plot.add_argument("--mode", choices=MODES, default="spatial")
    p_plot.add_argument("--at", type=float, default=None, help="sample time (default: final)")
    p_plot.add_argument("--out", type=Path, default=None, help="output SVG path")
    _common_flags(p_plot)
    return parser


def _print_summary(summary) -> None:
    print(f"label        {summary.label}")
    print(f"R_phase      {summary.R_phase:.6f}")
    print(f"R_heading    {summary.R_heading:.6f}")
    print(f"S_plus       {summary.S_plus:.6f}")
    print(f"S_minus      {summary.S_minus:.6f}")
    print(f"n_clusters   {summary.n_clusters}")
    print(f"mean_speed   {summary.mean_speed:.6g}")


def cmd_simulate(args) -> int:
    cfg, _ = load_config(args.config)
    if args.seed is not None:
        from dataclasses import replace

        cfg = replace(cfg, seed=args.seed)
    result = run_config(cfg, args.out_dir)
    _print_summary(result.summary)
    for f in result.files:
        print(f"wrote {f}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg, raw = load_config(args.config)
    sweep_section = raw.get("sweep")
    if not sweep_section:
        raise ConfigError(f"{args.config}: missing sweep section")
    if args.seed is not None:
        from dataclasses import replace

        cfg = replace(cfg, seed=args.seed)
    rows = run_sweep(cfg, sweep_section, workers=max(1, args.workers))
    args.out_dir.mkdir(parents=True, exist_ok=True)
    table = write_sweep_table(rows, args.out_dir / f"{cfg.name}.sweep.csv")
    n_err = sum(1 for r in rows if r["status"] != "ok")
    print(f"wrote {table} ({len(rows)} runs, {n_err} failed)")
    return EXIT_OK


def cmd_classify(args) -> int:
    traj = read_trajectory(args.trajectory)
    thresholds = ClassifierThresholds()
    meta_cfg = None
    try:
        import json

        from .io import sidecar_path

        meta_cfg = json.loads(sidecar_path(args.trajectory).read_text()).get("config")
    except FileNotFoundError:
        pass
    if meta_cfg and meta_cfg.get("init"):
        thresholds = default_thresholds(meta_cfg["init"].get("box_length", 1.0))
    label = classify(traj, window=args.window, thresholds=thresholds)
    print(label)
    return EXIT_OK


def cmd_plot(args) -> int:
    traj = read_trajectory(args.trajectory)
    at = args.at if args.at is not None else float(traj.times[-1])
    out = args.out
    if out is None:
        out = args.out_dir / f"{args.trajectory.stem}.{args.mode}.svg"
        args.out_dir.mkdir(parents=True, exist_ok=True)
    path = render_scatter(traj, args.mode, at, out)
    print(f"wrote {path}")
    return EXIT_OK


_COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "classify": cmd_classify,
    "plot": cmd_plot,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, FileNotFoundError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as err:
        print(f"solver abort: {err}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
