"""Parameter sweeps: a grid over (r, J, K) with replicates per point.

The grid expands in deterministic order (r outermost, then J, then K, then
replicate), each run gets its own derived seed, and one row per run lands in
a delimited summary table.  Individual run failures are recorded in their
row instead of aborting the sweep.  Runs are independent, so a worker pool
may execute them concurrently; the table is assembled in grid order after
all runs finish.
"""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from .config import ConfigError, SimConfig, derive_seed
from .integrators import SolverError
from .simulate import run_trajectory, summarize_run

SWEEP_COLUMNS = [
    "run_index",
    "r",
    "J",
    "K",
    "replicate",
    "seed",
    "status",
    "label",
    "R_phase",
    "R_heading",
    "S_plus",
    "S_minus",
    "n_clusters",
    "mean_speed",
    "error",
]

_GRID_KEYS = ("r", "J", "K")


def _axis_values(spec, axis: str) -> list[float]:
    if isinstance(spec, (list, tuple)):
        if not spec:
            raise ConfigError(f"sweep.grid.{axis} must not be empty")
        return [float(v) for v in spec]
    if isinstance(spec, dict):
        extra = set(spec) - {"start", "stop", "step"}
        if extra:
            raise ConfigError(f"unknown sweep.grid.{axis} field(s): {sorted(extra)}")
        try:
            start, stop, step = spec["start"], spec["stop"], spec["step"]
        except KeyError as err:
            raise ConfigError(f"sweep.grid.{axis} range needs start/stop/step") from err
        if step <= 0 or stop < start:
            raise ConfigError(f"sweep.grid.{axis}: need step > 0 and stop >= start")
        count = int((stop - start) / step + 1e-9) + 1
        return [start + k * step for k in range(count)]
    raise ConfigError(f"sweep.grid.{axis} must be a list or a start/stop/step object")


def expand_grid(sweep_section: dict) -> tuple[list[dict], int]:
    """Grid points in deterministic order plus the replicate count."""
    section = dict(sweep_section)
    grid_spec = section.pop("grid", None)
    replicates = section.pop("replicates", 1)
    if section:
        raise ConfigError(f"unknown sweep field(s): {', '.join(sorted(section))}")
    if not grid_spec:
        raise ConfigError("sweep.grid must name at least one of r, J, K")
    unknown = set(grid_spec) - set(_GRID_KEYS)
    if unknown:
        raise ConfigError(f"unknown sweep.grid axis: {sorted(unknown)}")
    if not isinstance(replicates, int) or replicates < 1:
        raise ConfigError(f"sweep.replicates must be an integer >= 1, got {replicates}")

    axes = {k: _axis_values(grid_spec[k], k) for k in _GRID_KEYS if k in grid_spec}
    points: list[dict] = [{}]
    for key in _GRID_KEYS:
        if key not in axes:
            continue
        points = [dict(pt, **{key: v}) for pt in points for v in axes[key]]
    return points, replicates


def _point_config(base: SimConfig, point: dict, seed: int) -> SimConfig:
    params = replace(base.params, **point)
    return replace(base, params=params, seed=seed, outputs=())


def run_sweep_point(payload: tuple) -> dict:
    """Execute one grid run; always returns a row dict (never raises)."""
    base, point, index, rep, seed = payload
    row = {
        "run_index": index,
        "r": point.get("r", base.params.r),
        "J": point.get("J", base.params.J),
        "K": point.get("K", base.params.K),
        "replicate": rep,
        "seed": seed,
        "status": "ok",
        "error": "",
    }
    try:
        cfg = _point_config(base, point, seed)
        traj = run_trajectory(cfg)
        summary = summarize_run(traj, cfg.init.box_length)
        row.update(summary.as_dict())
    except (SolverError, ValueError) as err:
        row["status"] = "error"
        row["error"] = str(err)
        for key in ("label", "R_phase", "R_heading", "S_plus", "S_minus", "n_clusters", "mean_speed"):
            row.setdefault(key, "")
    return row


def run_sweep(base: SimConfig, sweep_section: dict, workers: int = 1) -> list[dict]:
    """All grid runs, rows in deterministic grid order."""
    points, replicates = expand_grid(sweep_section)
    jobs = []
    index = 0
    for pi, point in enumerate(points):
        for rep in range(replicates):
            seed = derive_seed(base.seed, pi, rep)
            jobs.append((base, point, index, rep, seed))
            index += 1
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run_sweep_point, jobs))
    else:
        rows = [run_sweep_point(job) for job in jobs]
    rows.sort(key=lambda r: r["run_index"])
    return rows


def write_sweep_table(rows: list[dict], path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k, "") for k in SWEEP_COLUMNS})
    return path
