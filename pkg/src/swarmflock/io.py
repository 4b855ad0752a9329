"""Trajectory and summary files: delimited text plus a JSON metadata sidecar.

One row per (sample time, agent) with 17-significant-digit decimals, so
re-reading a file reproduces the in-memory float64 values bit-exactly.  The
sidecar (<name>.meta.json) carries the full effective config, seed, solver
statistics, and artifact version; read_trajectory() needs it to rebuild the
run.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from . import __version__
from .core import MODEL_SCS, MODEL_SV, ModelParams
from .integrators import IntegratorConfig, SolverStats, Trajectory

_EXTRA_COLUMNS = {
    MODEL_SV: ["theta", "xi"],
    MODEL_SCS: ["vx", "vy", "xi"],
}


def trajectory_columns(model_id: str) -> list[str]:
    return ["t", "agent_id", "x", "y"] + _EXTRA_COLUMNS.get(model_id, ["xi"])


def _fmt(v: float) -> str:
    return format(v, ".17g")


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_suffix(".meta.json")


def export_trajectory(traj: Trajectory, path, config_dict: dict | None = None) -> Path:
    """Write <path> (CSV) and its metadata sidecar; returns the CSV path."""
    if traj.n_samples == 0:
        raise ValueError("refusing to export an empty trajectory")
    path = Path(path)
    cols = trajectory_columns(traj.model_id)
    n = traj.n
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(cols)
        for k in range(traj.n_samples):
            t = traj.times[k]
            row_t = _fmt(t)
            sample = traj.samples[k]
            x = sample[: 2 * n].reshape(n, 2)
            if traj.model_id == MODEL_SV:
                extras = [sample[2 * n : 3 * n], sample[3 * n :]]
            elif traj.model_id == MODEL_SCS:
                v = sample[2 * n : 4 * n].reshape(n, 2)
                extras = [v[:, 0], v[:, 1], sample[4 * n :]]
            else:
                extras = [sample[2 * n :]]
            for i in range(n):
                writer.writerow(
                    [row_t, i, _fmt(x[i, 0]), _fmt(x[i, 1])]
                    + [_fmt(col[i]) for col in extras]
                )

    meta = {
        "artifact_version": __version__,
        "model": traj.model_id,
        "n_agents": n,
        "seed": traj.seed,
        "columns": cols,
        "n_samples": traj.n_samples,
        "solver_stats": traj.stats.as_dict(),
        "config": config_dict,
    }
    sidecar_path(path).write_text(json.dumps(meta, indent=2) + "\n")
    return path


def read_trajectory(path) -> Trajectory:
    """Rebuild a Trajectory from a CSV file and its metadata sidecar."""
    path = Path(path)
    meta_file = sidecar_path(path)
    if not meta_file.exists():
        raise FileNotFoundError(f"metadata sidecar not found: {meta_file}")
    meta = json.loads(meta_file.read_text())
    model_id = meta["model"]
    n = int(meta["n_agents"])
    cols = trajectory_columns(model_id)

    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != cols:
            raise ValueError(f"{path}: unexpected header {header!r}")
        rows = [[float(c) for c in row] for row in reader]
    if len(rows) % n != 0:
        raise ValueError(f"{path}: {len(rows)} data rows is not a multiple of N = {n}")
    n_samples = len(rows) // n

    times = np.empty(n_samples)
    width = 2 + len(_EXTRA_COLUMNS.get(model_id, ["xi"]))  # x, y + extras
    data = np.empty((n_samples, n, width))
    for k in range(n_samples):
        block = rows[k * n : (k + 1) * n]
        times[k] = block[0][0]
        for row in block:
            i = int(row[1])
            data[k, i] = row[2:]

    samples = np.empty((n_samples, 0))
    x = data[:, :, 0:2].reshape(n_samples, 2 * n)
    xi = data[:, :, -1]
    if model_id == MODEL_SV:
        theta = data[:, :, 2]
        samples = np.concatenate([x, theta, xi], axis=1)
    elif model_id == MODEL_SCS:
        v = data[:, :, 2:4].reshape(n_samples, 2 * n)
        samples = np.concatenate([x, v, xi], axis=1)
    else:
        samples = np.concatenate([x, xi], axis=1)

    config = None
    cfg_dict = meta.get("config") or {}
    integ = cfg_dict.get("integrator")
    if integ:
        config = IntegratorConfig(**integ)
    params = ModelParams()
    p_dict = cfg_dict.get("params")
    if p_dict:
        p_dict = dict(p_dict)
        if isinstance(p_dict.get("omega"), list):
            p_dict["omega"] = np.asarray(p_dict["omega"])
        params = ModelParams(**p_dict)

    stats = SolverStats(**meta.get("solver_stats", {}))
    return Trajectory(
        model_id=model_id,
        n=n,
        times=times,
        samples=samples,
        params=params,
        config=config,
        stats=stats,
        seed=meta.get("seed"),
    )


def export_summary(summary_dict: dict, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(summary_dict, indent=2, sort_keys=True) + "\n")
    return path
