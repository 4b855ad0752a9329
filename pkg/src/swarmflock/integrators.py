"""Time integration: fixed-step RK4 and adaptive Dormand-Prince 5(4).

The adaptive pair is the classical 7-stage DP5(4) tableau (the method behind
most general-purpose "45" solvers) with a PI step-size controller.  Instead
of dense-output interpolation, the step size is clamped so the solver lands
exactly on every requested sample time; that keeps runs bit-reproducible.

Output samples are taken at t = 0, sample_every, 2*sample_every, ... with the
final time always included, and angle components are re-wrapped after every
accepted step (the dynamics are 2*pi-periodic, so this only normalizes
storage).

The heading model's right-hand side is discontinuous when agents cross the
neighborhood boundary.  A long run of consecutive step rejections near such
a crossing falls back to accepting the current (tiny, still finite) step
with a warning instead of shrinking the step into oblivion; a genuine
blow-up (non-finite values driving the step below 1e-12) aborts with a
diagnostic naming the time reached.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import ModelParams, SystemState
from .dynamics import ModelOde, pack_state

MIN_STEP = 1e-12
SAFETY = 0.9
# PI controller exponents for an order-4 error estimate
PI_ALPHA = 0.7 / 5.0
PI_BETA = 0.4 / 5.0
MAX_FACTOR = 5.0
MIN_FACTOR = 0.1

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
# b5 - b4: weights of the embedded error estimate
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])


class SolverError(RuntimeError):
    """Integration failed; t_reached is the time where the step size died."""

    def __init__(self, message: str, t_reached: float):
        super().__init__(message)
        self.t_reached = t_reached


@dataclass
class IntegratorConfig:
    """Stepper selection and run horizon.

    method        "rk45" (adaptive, the default) or "rk4" (fixed step)
    dt            fixed step for rk4
    rel_tol, abs_tol
                  adaptive error tolerances; the per-component error scale is
                  max(abs_tol, rel_tol * |y|)
    t_end         final time
    sample_every  output sampling interval
    freeze_neighbors
                  heading model only: reuse one neighborhood snapshot per
                  step instead of rebuilding it at every stage
    """

    t_end: float
    sample_every: float
    method: str = "rk45"
    dt: float = 0.01
    rel_tol: float = 1e-6
    abs_tol: float = 1e-9
    freeze_neighbors: bool = False

    def __post_init__(self):
        if self.method not in ("rk4", "rk45"):
            raise ValueError(f"method must be rk4 or rk45, got {self.method!r}")
        if not (self.t_end > 0):
            raise ValueError(f"t_end must be > 0, got {self.t_end}")
        if not (self.sample_every > 0):
            raise ValueError(f"sample_every must be > 0, got {self.sample_every}")
        if not (self.dt > 0):
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("rel_tol and abs_tol must be > 0")


@dataclass
class SolverStats:
    n_accepted: int = 0
    n_rejected: int = 0
    n_rhs_evals: int = 0
    n_storm_accepts: int = 0

    def as_dict(self) -> dict:
        return {
            "n_accepted": self.n_accepted,
            "n_rejected": self.n_rejected,
            "n_rhs_evals": self.n_rhs_evals,
            "n_storm_accepts": self.n_storm_accepts,
        }


@dataclass
class Trajectory:
    """Sampled states of one run plus everything needed to reproduce it."""

    model_id: str
    n: int
    times: np.ndarray
    samples: np.ndarray  # (n_samples, state_dim), flat layout per dynamics
    params: ModelParams
    config: IntegratorConfig | None = None
    stats: SolverStats = field(default_factory=SolverStats)
    seed: int | None = None

    @property
    def n_samples(self) -> int:
        return len(self.times)

    def state(self, k: int) -> SystemState:
        from .dynamics import unpack_state

        return unpack_state(self.model_id, self.n, self.samples[k], t=float(self.times[k]))

    def final_state(self) -> SystemState:
        return self.state(self.n_samples - 1)


def step_rk4(y: np.ndarray, rhs, dt: float):
    """One classical 4-stage Runge-Kutta step for y' = rhs(y)."""
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    y = np.asarray(y, dtype=float)
    k1 = np.asarray(rhs(y))
    k2 = np.asarray(rhs(y + 0.5 * dt * k1))
    k3 = np.asarray(rhs(y + 0.5 * dt * k2))
    k4 = np.asarray(rhs(y + dt * k3))
    for k in (k1, k2, k3, k4):
        if not np.all(np.isfinite(k)):
            raise SolverError("non-finite derivative in RK4 stage", t_reached=math.nan)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def sample_times(t_end: float, sample_every: float) -> np.ndarray:
    """t = 0, s, 2s, ... with t_end always the last entry."""
    n_full = int(math.floor(t_end / sample_every + 1e-12))
    times = [k * sample_every for k in range(n_full + 1)]
    if times[-1] < t_end * (1.0 - 1e-12):
        times.append(t_end)
    else:
        times[-1] = min(times[-1], t_end)
    return np.array(times)


def _initial_step(f, y0, f0, scale, t_span, stats):
    """Standard two-probe startup heuristic for the adaptive stepper."""
    d0 = np.max(np.abs(y0) / scale)
    d1 = np.max(np.abs(f0) / scale)
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    y1 = y0 + h0 * f0
    f1 = np.asarray(f(y1))
    stats.n_rhs_evals += 1
    d2 = np.max(np.abs(f1 - f0) / scale) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100.0 * h0, h1, t_span)


def integrate_flat(f, y0, cfg: IntegratorConfig, wrap=None, begin_step=None):
    """Drive y' = f(y) from t = 0 to cfg.t_end, sampling on the configured grid.

    wrap(y), if given, normalizes a state after each accepted step (angle
    re-wrapping); begin_step(y) is called once per attempted step before its
    stages (per-step neighborhood snapshots).  Returns (times, samples,
    stats) with samples[k] the state at times[k].
    """
    y = np.array(y0, dtype=float)
    times = sample_times(cfg.t_end, cfg.sample_every)
    samples = np.empty((len(times), y.size))
    samples[0] = y
    stats = SolverStats()

    if cfg.method == "rk4":
        _run_rk4(f, y, times, samples, cfg, wrap, begin_step, stats)
    else:
        _run_rk45(f, y, times, samples, cfg, wrap, begin_step, stats)
    return times, samples, stats


def _run_rk4(f, y, times, samples, cfg, wrap, begin_step, stats):
    t = 0.0
    for k in range(1, len(times)):
        span = times[k] - t
        n_sub = max(1, math.ceil(span / cfg.dt - 1e-12))
        h = span / n_sub
        for _ in range(n_sub):
            if begin_step is not None:
                begin_step(y)
            try:
                y = step_rk4(y, f, h)
            except SolverError as err:
                raise SolverError(
                    f"non-finite derivative at t = {t:.6g}", t_reached=t
                ) from err
            stats.n_accepted += 1
            stats.n_rhs_evals += 4
            if wrap is not None:
                y = wrap(y)
            t += h
        t = float(times[k])
        samples[k] = y


def _run_rk45(f, y, times, samples, cfg, wrap, begin_step, stats):
    t = 0.0
    scale = np.maximum(cfg.abs_tol, cfg.rel_tol * np.abs(y))
    f0 = np.asarray(f(y))
    stats.n_rhs_evals += 1
    if not np.all(np.isfinite(f0)):
        raise SolverError("non-finite derivative at t = 0", t_reached=0.0)
    # h_full is the controller's preferred step; attempts may be clamped
    # shorter to land exactly on sample times without losing it.
    h_full = _initial_step(f, y, f0, scale, float(times[-1]), stats)

    err_prev = 1e-4
    n_stages = 7
    k = np.empty((n_stages, y.size))

    for idx in range(1, len(times)):
        t_target = float(times[idx])
        while True:
            gap = t_target - t
            if gap <= 1e-12 * max(1.0, t_target):
                t = t_target
                break
            # A rejection storm has driven the step to the floor: keep going
            # at the minimum step (with a warning) as long as values stay
            # finite, rather than giving up near a RHS discontinuity.
            forced = h_full < MIN_STEP
            h = min(MIN_STEP, gap) if forced else min(h_full, gap)
            clamped = h >= gap
            if begin_step is not None:
                begin_step(y)
            # let non-finite values propagate quietly; they are detected below
            with np.errstate(over="ignore", invalid="ignore"):
                k[0] = f(y)
                for s in range(1, n_stages):
                    k[s] = f(y + h * (k[:s].T @ _A[s]))
                y_new = y + h * (k.T @ _B5)
                err_vec = h * (k.T @ _E)
            stats.n_rhs_evals += n_stages

            finite = np.all(np.isfinite(y_new)) and np.all(np.isfinite(err_vec))
            if finite:
                scale = np.maximum(cfg.abs_tol, cfg.rel_tol * np.abs(y))
                err = float(np.max(np.abs(err_vec) / scale))
            else:
                err = math.inf

            if not finite and forced:
                raise SolverError(
                    f"solution blew up near t = {t:.10g}: non-finite values at the "
                    f"minimum step size {MIN_STEP:g}",
                    t_reached=t,
                )

            if err <= 1.0 or forced:
                if err > 1.0:
                    stats.n_storm_accepts += 1
                    warnings.warn(
                        f"step size underflow at t = {t:.6g}: accepting a minimum-size "
                        f"step (error control unreliable near a discontinuity)",
                        RuntimeWarning,
                        stacklevel=2,
                    )
                    err_prev = 1e-4
                    h_full = MIN_STEP
                else:
                    factor = SAFETY * max(err, 1e-10) ** -PI_ALPHA * err_prev ** PI_BETA
                    factor = min(MAX_FACTOR, max(MIN_FACTOR, factor))
                    err_prev = max(err, 1e-4)
                    if not clamped or h * factor > h_full:
                        h_full = h * factor
                stats.n_accepted += 1
                t = t_target if clamped else t + h
                y = y_new
                if wrap is not None:
                    y = wrap(y)
            else:
                stats.n_rejected += 1
                if math.isinf(err):
                    factor = MIN_FACTOR
                else:
                    factor = min(0.9, max(MIN_FACTOR, SAFETY * err ** -0.2))
                h_full = h * factor
        samples[idx] = y


def integrate(
    initial: SystemState,
    params: ModelParams,
    cfg: IntegratorConfig,
    seed: int | None = None,
    include_self: bool = True,
) -> Trajectory:
    """Integrate a model state over [0, t_end] and return the sampled run."""
    ode = ModelOde(
        initial.model_id,
        initial.n,
        params,
        include_self=include_self,
        freeze_neighbors=cfg.freeze_neighbors,
    )
    y0 = pack_state(initial)
    times, samples, stats = integrate_flat(
        ode.rhs, y0, cfg, wrap=ode.wrap, begin_step=ode.begin_step if cfg.freeze_neighbors else None
    )
    return Trajectory(
        model_id=initial.model_id,
        n=initial.n,
        times=times,
        samples=samples,
        params=params,
        config=cfg,
        stats=stats,
        seed=seed,
    )
