"""End-to-end single runs: init, integrate, classify, export."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .config import SimConfig, config_to_dict, init_random
from .integrators import Trajectory, integrate
from .io import export_summary, export_trajectory
from .observables import (
    LABEL_UNCLASSIFIED,
    ObservableSummary,
    default_thresholds,
    label_from_stats,
    summarize,
    tail_stats,
)
from .plots import render_scatter


@dataclass
class RunResult:
    trajectory: Trajectory
    summary: ObservableSummary
    files: list[Path]


def run_trajectory(cfg: SimConfig) -> Trajectory:
    initial = init_random(cfg.init, cfg.model_id, cfg.n_agents, cfg.seed)
    return integrate(
        initial, cfg.params, cfg.integrator, seed=cfg.seed, include_self=cfg.include_self
    )


def summarize_run(traj: Trajectory, box_length: float, window: float | None = None):
    """Label + final-sample observables for a finished run.

    Runs too short (or too sparsely sampled) to classify get the
    "unclassified" label rather than an error.
    """
    thresholds = default_thresholds(box_length)
    if window is None:
        window = float(traj.times[-1] - traj.times[0]) / 5.0
    mean_speed = None
    label = LABEL_UNCLASSIFIED
    try:
        stats = tail_stats(traj, window, thresholds)
        label = label_from_stats(stats, traj.n, thresholds)
        mean_speed = stats.mean_speed
    except ValueError:
        pass
    return summarize(traj.final_state(), mean_speed=mean_speed, label=label)


def run_config(cfg: SimConfig, out_dir) -> RunResult:
    """Execute one configured run and write its requested outputs."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    traj = run_trajectory(cfg)
    summary = summarize_run(traj, cfg.init.box_length)

    files: list[Path] = []
    base = out_dir / cfg.name
    if "trajectory" in cfg.outputs:
        csv_path = export_trajectory(
            traj, base.with_suffix(".csv"), config_dict=config_to_dict(cfg)
        )
        files += [csv_path, csv_path.with_suffix(".meta.json")]
    if "summary" in cfg.outputs:
        payload = dict(summary.as_dict())
        payload.update(
            {
                "model": cfg.model_id,
                "n_agents": cfg.n_agents,
                "seed": cfg.seed,
                "t_end": cfg.integrator.t_end,
                "solver_stats": traj.stats.as_dict(),
            }
        )
        files.append(export_summary(payload, out_dir / f"{cfg.name}.summary.json"))
    if "plots" in cfg.outputs:
        t_end = cfg.integrator.t_end
        files.append(render_scatter(traj, "spatial", t_end, out_dir / f"{cfg.name}.spatial.svg"))
        files.append(render_scatter(traj, "psi-xi", t_end, out_dir / f"{cfg.name}.psi-xi.svg"))
    return RunResult(trajectory=traj, summary=summary, files=files)
