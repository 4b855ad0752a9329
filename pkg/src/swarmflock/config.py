"""Run configuration: JSON schema, validation, and initial-condition draws.

A config file is a JSON object with the sections shown in the README::

    {
      "model": "swarmalator-vicsek",
      "n_agents": 300,
      "seed": 42,
      "params": {"A": 1.0, "B": 1.0, "J": 0.1, "K": 1.0, "r": 1.4, "v0": 0.003},
      "init": {"box_length": 1.0},
      "integrator": {"t_end": 50.0, "sample_every": 1.0},
      "outputs": ["trajectory", "summary"]
    }

Unknown keys anywhere are errors (fail fast, naming the offending field).

Initial conditions come from per-field counter-based (Philox) streams keyed
by (seed, field), so agent i's draw is the i-th value of its field's stream:
growing N extends the population without disturbing earlier agents, and the
draws are reproducible across platforms.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .core import MODEL_IDS, MODEL_SCS, MODEL_SV, ModelParams, SystemState
from .integrators import IntegratorConfig


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


@dataclass
class InitSpec:
    """Initial-condition ranges.

    Positions are uniform in the origin-centered square of side box_length;
    phases uniform in [-pi, pi]; headings uniform in [0, 2*pi) (stored
    wrapped); velocities uniform in the centered square of half-width
    velocity_half_width.
    """

    box_length: float = 1.0
    velocity_half_width: float = 0.1

    def __post_init__(self):
        if not (self.box_length > 0):
            raise ConfigError(f"init.box_length must be > 0, got {self.box_length}")
        if self.velocity_half_width < 0:
            raise ConfigError(
                f"init.velocity_half_width must be >= 0, got {self.velocity_half_width}"
            )


@dataclass
class SimConfig:
    model_id: str
    n_agents: int
    seed: int
    params: ModelParams
    init: InitSpec = field(default_factory=InitSpec)
    integrator: IntegratorConfig = field(default_factory=lambda: IntegratorConfig(t_end=50.0, sample_every=1.0))
    outputs: tuple[str, ...] = ("trajectory", "summary")
    include_self: bool = True
    name: str = "run"

    def __post_init__(self):
        if self.model_id not in MODEL_IDS:
            raise ConfigError(
                f"model must be one of {', '.join(MODEL_IDS)}, got {self.model_id!r}"
            )
        if self.n_agents < 1:
            raise ConfigError(f"n_agents must be >= 1, got {self.n_agents}")
        if not (0 <= self.seed < 2**64):
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.model_id == MODEL_SV and self.params.r is None:
            raise ConfigError("params.r is required for the swarmalator-vicsek model")
        bad = set(self.outputs) - {"trajectory", "summary", "plots"}
        if bad:
            raise ConfigError(f"unknown outputs: {sorted(bad)}")


# field tags for the per-field random streams
_FIELD_POSITION = 0
_FIELD_HEADING = 1
_FIELD_PHASE = 2
_FIELD_VELOCITY = 3


def _field_stream(seed: int, field_tag: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(field_tag,))
    return np.random.Generator(np.random.Philox(ss))


def init_random(spec: InitSpec, model_id: str, n: int, seed: int) -> SystemState:
    """Draw a reproducible random initial state.

    Each field uses its own counter-based stream, with agent i taking the
    i-th draw, so states are independent of how many agents follow.
    """
    half = spec.box_length / 2.0
    x = _field_stream(seed, _FIELD_POSITION).uniform(-half, half, size=(n, 2))
    xi = _field_stream(seed, _FIELD_PHASE).uniform(-math.pi, math.pi, size=n)
    if model_id == MODEL_SV:
        theta = _field_stream(seed, _FIELD_HEADING).uniform(0.0, 2.0 * math.pi, size=n)
        return SystemState(model_id, x=x, theta=theta, xi=xi)
    if model_id == MODEL_SCS:
        w = spec.velocity_half_width
        v = _field_stream(seed, _FIELD_VELOCITY).uniform(-w, w, size=(n, 2))
        return SystemState(model_id, x=x, v=v, xi=xi)
    return SystemState(model_id, x=x, xi=xi)


def derive_seed(base_seed: int, *key: int) -> int:
    """Stable 64-bit seed for a child run (sweep point, replicate, ...)."""
    ss = np.random.SeedSequence(entropy=int(base_seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])


def _take(section: dict, allowed: dict, where: str) -> dict:
    """Pop known keys with defaults; reject anything left over."""
    out = {}
    for key, default in allowed.items():
        out[key] = section.pop(key) if key in section else default
    if section:
        raise ConfigError(f"unknown {where} field(s): {', '.join(sorted(section))}")
    return out


_REQUIRED = object()


def config_from_dict(raw: dict, name: str = "run") -> SimConfig:
    raw = dict(raw)
    top = _take(
        raw,
        {
            "model": _REQUIRED,
            "n_agents": _REQUIRED,
            "seed": _REQUIRED,
            "params": {},
            "init": {},
            "integrator": _REQUIRED,
            "outputs": ["trajectory", "summary"],
            "include_self": True,
            "sweep": None,  # parsed by the sweep driver
        },
        "config",
    )
    missing = [k for k in ("model", "n_agents", "seed", "integrator") if top[k] is _REQUIRED]
    if missing:
        raise ConfigError(f"missing required field(s): {', '.join(missing)}")

    params_kw = _take(
        dict(top["params"]),
        {
            "A": 1.0,
            "B": 1.0,
            "J": 0.0,
            "K": 0.0,
            "r": None,
            "v0": 0.003,
            "omega": 0.0,
            "cs_H": 1.0,
            "cs_beta": 1.0,
        },
        "params",
    )
    init_kw = _take(
        dict(top["init"]), {"box_length": 1.0, "velocity_half_width": 0.1}, "init"
    )
    integ_kw = _take(
        dict(top["integrator"]),
        {
            "t_end": _REQUIRED,
            "sample_every": _REQUIRED,
            "method": "rk45",
            "dt": 0.01,
            "rel_tol": 1e-6,
            "abs_tol": 1e-9,
            "freeze_neighbors": False,
        },
        "integrator",
    )
    missing = [k for k in ("t_end", "sample_every") if integ_kw[k] is _REQUIRED]
    if missing:
        raise ConfigError(f"missing required integrator field(s): {', '.join(missing)}")

    try:
        params = ModelParams(**params_kw)
        integrator = IntegratorConfig(**integ_kw)
        init = InitSpec(**init_kw)
    except ValueError as err:
        raise ConfigError(str(err)) from err

    if not isinstance(top["seed"], int) or isinstance(top["seed"], bool):
        raise ConfigError(f"seed must be an integer, got {top['seed']!r}")

    return SimConfig(
        model_id=top["model"],
        n_agents=int(top["n_agents"]),
        seed=top["seed"],
        params=params,
        init=init,
        integrator=integrator,
        outputs=tuple(top["outputs"]),
        include_self=bool(top["include_self"]),
        name=name,
    )


def load_config(path) -> tuple[SimConfig, dict]:
    """Parse and validate a JSON config file; returns (config, raw dict)."""
    from pathlib import Path

    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}: not valid JSON ({err})") from err
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return config_from_dict(raw, name=path.stem), raw


def config_to_dict(cfg: SimConfig) -> dict:
    """Full effective configuration (defaults resolved) for metadata files."""
    p = cfg.params
    omega = p.omega
    if isinstance(omega, np.ndarray):
        omega = omega.tolist()
    return {
        "model": cfg.model_id,
        "n_agents": cfg.n_agents,
        "seed": cfg.seed,
        "params": {
            "A": p.A,
            "B": p.B,
            "J": p.J,
            "K": p.K,
            "r": p.r,
            "v0": p.v0,
            "omega": omega,
            "cs_H": p.cs_H,
            "cs_beta": p.cs_beta,
        },
        "init": {
            "box_length": cfg.init.box_length,
            "velocity_half_width": cfg.init.velocity_half_width,
        },
        "integrator": {
            "t_end": cfg.integrator.t_end,
            "sample_every": cfg.integrator.sample_every,
            "method": cfg.integrator.method,
            "dt": cfg.integrator.dt,
            "rel_tol": cfg.integrator.rel_tol,
            "abs_tol": cfg.integrator.abs_tol,
            "freeze_neighbors": cfg.integrator.freeze_neighbors,
        },
        "outputs": list(cfg.outputs),
        "include_self": cfg.include_self,
    }
