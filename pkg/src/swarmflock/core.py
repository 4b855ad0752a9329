"""Domain types, angle arithmetic, and the pairwise interaction kernels.

Everything here is a pure function of its inputs; there is no shared mutable
state, so concurrent evaluation from any number of threads is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MODEL_BASELINE = "baseline-swarmalator"
MODEL_SV = "swarmalator-vicsek"
MODEL_SCS = "swarmalator-cucker-smale"
MODEL_IDS = (MODEL_BASELINE, MODEL_SV, MODEL_SCS)

TWO_PI = 2.0 * math.pi

# Pairs closer than this are treated as coincident: their spatial and phase
# coupling terms are dropped for that evaluation instead of dividing by ~0.
EPS_DIST = 1e-9


def _wrap_unchecked(a):
    # mod lands in [0, 2*pi), so pi - mod(pi - a) lands in (-pi, pi].
    return np.pi - np.mod(np.pi - a, TWO_PI)


def wrap_angle(a):
    """Wrap an angle (scalar or array, radians) into (-pi, pi].

    The result differs from the input by an integer multiple of 2*pi.
    Non-finite input is rejected.
    """
    a = np.asarray(a, dtype=float)
    if not np.all(np.isfinite(a)):
        raise ValueError("wrap_angle: non-finite angle")
    wrapped = _wrap_unchecked(a)
    if wrapped.ndim == 0:
        return float(wrapped)
    return wrapped


@dataclass
class ModelParams:
    """Dynamics constants shared by the three models.

    A, B        spatial attraction / repulsion strengths (both > 0)
    J           phase-spatial coupling, constrained to [-1, 1]
    K           phase coupling strength (K > 0 pulls phases together)
    r           interaction radius; required (> 0) for the local-neighborhood
                model only
    v0          self-propulsion speed of the heading-based model
    omega       natural frequency; scalar shared by all agents, or a
                per-agent array
    cs_H, cs_beta
                velocity-alignment kernel magnitude and decay exponent
    """

    A: float = 1.0
    B: float = 1.0
    J: float = 0.0
    K: float = 0.0
    r: float | None = None
    v0: float = 0.003
    omega: float | np.ndarray = 0.0
    cs_H: float = 1.0
    cs_beta: float = 1.0

    def __post_init__(self):
        if not (self.A > 0.0):
            raise ValueError(f"ModelParams.A must be > 0, got {self.A}")
        if not (self.B > 0.0):
            raise ValueError(f"ModelParams.B must be > 0, got {self.B}")
        if not (-1.0 <= self.J <= 1.0):
            raise ValueError(f"ModelParams.J must lie in [-1, 1], got {self.J}")
        if self.r is not None and not (self.r > 0.0):
            raise ValueError(f"ModelParams.r must be > 0, got {self.r}")
        if self.cs_H < 0.0:
            raise ValueError(f"ModelParams.cs_H must be >= 0, got {self.cs_H}")
        if self.cs_beta < 0.0:
            raise ValueError(f"ModelParams.cs_beta must be >= 0, got {self.cs_beta}")

    def omega_vector(self, n: int) -> np.ndarray:
        """Natural frequencies as an (n,) array (broadcasting the scalar default)."""
        w = np.asarray(self.omega, dtype=float)
        if w.ndim == 0:
            return np.full(n, float(w))
        if w.shape != (n,):
            raise ValueError(f"omega has shape {w.shape}, expected ({n},)")
        return w


@dataclass(frozen=True)
class AgentStateSV:
    """One heading-based agent: position, heading angle, oscillator phase."""

    x: tuple[float, float]
    theta: float
    xi: float


@dataclass(frozen=True)
class AgentStateSCS:
    """One velocity-based agent: position, velocity, oscillator phase."""

    x: tuple[float, float]
    v: tuple[float, float]
    xi: float


@dataclass
class SystemState:
    """Full system snapshot, stored struct-of-arrays for fast vector math.

    x is (N, 2); xi is (N,); theta (N,) exists for the heading model and v
    (N, 2) for the velocity model.  theta and xi are kept wrapped to
    (-pi, pi].  N >= 1 and is constant over a run.
    """

    model_id: str
    x: np.ndarray
    xi: np.ndarray
    theta: np.ndarray | None = None
    v: np.ndarray | None = None
    t: float = 0.0

    def __post_init__(self):
        if self.model_id not in MODEL_IDS:
            raise ValueError(f"unknown model_id {self.model_id!r}")
        self.x = np.atleast_2d(np.asarray(self.x, dtype=float))
        self.xi = np.atleast_1d(np.asarray(self.xi, dtype=float))
        n = self.x.shape[0]
        if n < 1 or self.x.shape != (n, 2):
            raise ValueError(f"x must be (N, 2) with N >= 1, got {self.x.shape}")
        if self.xi.shape != (n,):
            raise ValueError(f"xi must be ({n},), got {self.xi.shape}")
        self.xi = wrap_angle(self.xi)
        if self.model_id == MODEL_SV:
            if self.theta is None:
                raise ValueError("heading model state needs theta")
            self.theta = wrap_angle(np.atleast_1d(np.asarray(self.theta, dtype=float)))
            if self.theta.shape != (n,):
                raise ValueError(f"theta must be ({n},), got {self.theta.shape}")
        elif self.theta is not None:
            raise ValueError(f"{self.model_id} carries no theta")
        if self.model_id == MODEL_SCS:
            if self.v is None:
                raise ValueError("velocity model state needs v")
            self.v = np.atleast_2d(np.asarray(self.v, dtype=float))
            if self.v.shape != (n, 2):
                raise ValueError(f"v must be ({n}, 2), got {self.v.shape}")
        elif self.v is not None:
            raise ValueError(f"{self.model_id} carries no v")

    @property
    def n(self) -> int:
        return self.x.shape[0]

    def agent(self, i: int):
        """Single-agent view as the matching frozen record type."""
        if self.model_id == MODEL_SV:
            return AgentStateSV(x=tuple(self.x[i]), theta=float(self.theta[i]), xi=float(self.xi[i]))
        if self.model_id == MODEL_SCS:
            return AgentStateSCS(x=tuple(self.x[i]), v=tuple(self.v[i]), xi=float(self.xi[i]))
        return (tuple(self.x[i]), float(self.xi[i]))

    def copy(self) -> "SystemState":
        return SystemState(
            model_id=self.model_id,
            x=self.x.copy(),
            xi=self.xi.copy(),
            theta=None if self.theta is None else self.theta.copy(),
            v=None if self.v is None else self.v.copy(),
            t=self.t,
        )


def phi_E(dist, s, p: ModelParams):
    """Spatial interaction weight (A + J*cos(s))/dist - B/dist**2.

    Multiplied by the raw separation vector this gives phase-modulated unit
    attraction against inverse-square repulsion; it vanishes exactly at
    dist = B/(A + J*cos(s)).  dist must be > 0 (the kernel is singular at 0;
    coincident pairs are the caller's problem, see EPS_DIST).
    """
    dist = np.asarray(dist, dtype=float)
    if np.any(dist <= 0.0):
        raise ValueError("phi_E: dist must be > 0 (coincident agents)")
    out = (p.A + p.J * np.cos(s)) / dist - p.B / (dist * dist)
    return float(out) if out.ndim == 0 else out


def phi_xi_summand(dist, s, K: float):
    """Phase-coupling contribution of one neighbor: K*sin(s)/dist."""
    dist = np.asarray(dist, dtype=float)
    if np.any(dist <= 0.0):
        raise ValueError("phi_xi_summand: dist must be > 0 (coincident agents)")
    out = K * np.sin(s) / dist
    return float(out) if out.ndim == 0 else out


def phi_theta_summand(z):
    """Heading-alignment contribution of one neighbor: the wrapped difference.

    The alignment weight is constant 1, so the summand is just z itself,
    wrapped to (-pi, pi] so antipodal headings do not couple through +-2*pi.
    """
    return wrap_angle(z)


def phi_v(dist, p: ModelParams):
    """Velocity-alignment communication rate cs_H / (1 + dist**2)**cs_beta.

    Finite everywhere (including dist = 0) and non-increasing in dist.
    """
    dist = np.asarray(dist, dtype=float)
    if np.any(dist < 0.0):
        raise ValueError("phi_v: dist must be >= 0")
    out = p.cs_H / (1.0 + dist * dist) ** p.cs_beta
    return float(out) if out.ndim == 0 else out
