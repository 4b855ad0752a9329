"""Time-derivative (right-hand-side) evaluation for the three models.

The public rhs_* functions take a SystemState and return a Derivative; they
are pure functions of their inputs, so per-agent rows can be evaluated
concurrently and the result never depends on evaluation order.

Internally the pairwise sums are written as masked (N, N) weight matrices
reduced with matrix-vector products, and cos/sin of pairwise differences are
expanded through angle-sum identities into outer products.  That keeps the
cost per evaluation at a handful of BLAS-bound O(N^2) passes with no
transcendental calls on (N, N) arrays, which is what makes long runs at
N = 500 practical.  Tests check this path against a literal double-loop
transcription of the model equations.

ModelOde adapts a model to the flat state vectors the time steppers use.
Flat layout: positions (2N, row-major), then heading (N) for the heading
model or velocity (2N) for the velocity model, then phases (N).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    EPS_DIST,
    MODEL_BASELINE,
    MODEL_IDS,
    MODEL_SCS,
    MODEL_SV,
    TWO_PI,
    ModelParams,
    SystemState,
    _wrap_unchecked,
)
from .neighbors import NeighborList, neighbor_list


@dataclass
class Derivative:
    """Time derivative with the same per-agent shape as the state."""

    dx: np.ndarray
    dxi: np.ndarray
    dtheta: np.ndarray | None = None
    dv: np.ndarray | None = None


class _Workspace:
    """Reusable (N, N) scratch buffers for the pairwise kernels.

    One workspace serves one sequential stream of evaluations (ModelOde keeps
    one per instance); sharing an instance across threads is not safe.
    """

    def __init__(self, n: int):
        self.n = n
        self.d2 = np.empty((n, n))
        self.inv_d = np.empty((n, n))
        self.w = np.empty((n, n))
        self.scratch = np.empty((n, n))
        self.keep = np.empty((n, n), dtype=bool)


def _pair_distances(x: np.ndarray, ws: _Workspace):
    """Fill ws.d2, ws.keep, and ws.inv_d (1/distance, excluded pairs zeroed)."""
    xc, yc = x[:, 0], x[:, 1]
    dx = np.subtract(xc[None, :], xc[:, None], out=ws.scratch)
    np.multiply(dx, dx, out=ws.d2)
    dy = np.subtract(yc[None, :], yc[:, None], out=ws.scratch)
    np.multiply(dy, dy, out=ws.inv_d)
    ws.d2 += ws.inv_d
    np.greater_equal(ws.d2, EPS_DIST * EPS_DIST, out=ws.keep)
    d = np.sqrt(ws.d2, out=ws.scratch)
    ws.inv_d.fill(0.0)
    np.divide(1.0, d, out=ws.inv_d, where=ws.keep)


def _spatial_weights(xi, p: ModelParams, ws: _Workspace):
    """Fill ws.w with phi_E(d_ij, xi_j - xi_i) on kept pairs, 0 elsewhere.

    ws.inv_d is already 0 on excluded pairs, which zeroes both terms.
    cos(xi_j - xi_i) expands to c_i c_j + s_i s_j, one rank-2 matmul.
    """
    c = np.cos(xi)
    s = np.sin(xi)
    u = np.column_stack([c, s])
    np.matmul(u, u.T, out=ws.w)
    ws.w *= p.J
    ws.w += p.A
    ws.w *= ws.inv_d
    m2 = np.multiply(ws.inv_d, ws.inv_d, out=ws.scratch)
    m2 *= p.B
    ws.w -= m2
    return c, s


def _difference_sum(w: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Row-wise sum_j w_ij (q_j - q_i) for q of shape (N,) or (N, k)."""
    if q.ndim == 1:
        return w @ q - q * w.sum(axis=1)
    return w @ q - q * w.sum(axis=1)[:, None]


def _phase_sum(inv_d: np.ndarray, c: np.ndarray, s: np.ndarray) -> np.ndarray:
    # sum_j sin(xi_j - xi_i)/d_ij = c_i (M s)_i - s_i (M c)_i
    return c * (inv_d @ s) - s * (inv_d @ c)


def _baseline_rates(x, xi, p: ModelParams, omega, ws: _Workspace | None = None):
    n = x.shape[0]
    ws = ws or _Workspace(n)
    _pair_distances(x, ws)
    c, s = _spatial_weights(xi, p, ws)
    xdot = _difference_sum(ws.w, x) / n
    xidot = omega + (p.K / n) * _phase_sum(ws.inv_d, c, s)
    return xdot, xidot


def _scs_rates(x, v, xi, p: ModelParams, omega, ws: _Workspace | None = None):
    n = x.shape[0]
    ws = ws or _Workspace(n)
    _pair_distances(x, ws)
    c, s = _spatial_weights(xi, p, ws)
    vdot = _difference_sum(ws.w, x)
    # Alignment rate is finite everywhere; self terms cancel in the
    # difference sum, so the full matrix (diagonal included) is fine.
    wv = np.add(ws.d2, 1.0, out=ws.w)  # ws.w is free after its difference sum
    if p.cs_beta == 1.0:
        np.divide(p.cs_H, wv, out=wv)
    else:
        np.power(wv, p.cs_beta, out=wv)
        np.divide(p.cs_H, wv, out=wv)
    vdot += _difference_sum(wv, v)
    vdot /= n
    xidot = omega + (p.K / n) * _phase_sum(ws.inv_d, c, s)
    return v.copy(), vdot, xidot


def _sv_rates(
    x, theta, xi, p: ModelParams, omega, adj=None, include_self=True, ws: _Workspace | None = None
):
    ws = ws or _Workspace(x.shape[0])
    _pair_distances(x, ws)
    if adj is None:
        if p.r is None:
            raise ValueError("heading model needs params.r (interaction radius)")
        adj = ws.d2 <= p.r * p.r
        if not include_self:
            np.fill_diagonal(adj, False)
    counts = adj.sum(axis=1)
    inv_cnt = 1.0 / np.maximum(counts, 1)

    ws.keep &= adj
    ws.inv_d *= ws.keep
    c, s = _spatial_weights(xi, p, ws)
    w = ws.w
    w *= inv_cnt[:, None]

    heading = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    xdot = p.v0 * heading + _difference_sum(w, x)

    # wrapped pairwise heading differences, summed over the neighborhood
    dth = np.subtract(theta[None, :], theta[:, None], out=ws.scratch)
    np.subtract(np.pi, dth, out=dth)
    np.mod(dth, TWO_PI, out=dth)
    np.subtract(np.pi, dth, out=dth)
    dth *= adj
    thetadot = inv_cnt * dth.sum(axis=1)

    xidot = omega + p.K * inv_cnt * _phase_sum(ws.inv_d, c, s)
    return xdot, thetadot, xidot


def rhs_baseline(state: SystemState, p: ModelParams) -> Derivative:
    """Global swarmalator: 1/N all-to-all coupling on positions and phases."""
    if state.model_id != MODEL_BASELINE:
        raise ValueError(f"expected a {MODEL_BASELINE} state, got {state.model_id}")
    omega = p.omega_vector(state.n)
    xdot, xidot = _baseline_rates(state.x, state.xi, p, omega)
    return Derivative(dx=xdot, dxi=xidot)


def rhs_sv(
    state: SystemState,
    p: ModelParams,
    nl: NeighborList | None = None,
    include_self: bool = True,
) -> Derivative:
    """Heading model: neighborhood-averaged coupling within radius p.r.

    nl must be built from state.x with radius p.r; pass None to have the
    neighborhood computed here.  Self terms contribute zero to every sum but
    (with include_self) do count in the 1/|neighborhood| normalization.
    """
    if state.model_id != MODEL_SV:
        raise ValueError(f"expected a {MODEL_SV} state, got {state.model_id}")
    omega = p.omega_vector(state.n)
    adj = None
    if nl is not None:
        adj = nl.adjacency()
        include_self = nl.include_self
    xdot, thetadot, xidot = _sv_rates(
        state.x, state.theta, state.xi, p, omega, adj=adj, include_self=include_self
    )
    return Derivative(dx=xdot, dxi=xidot, dtheta=thetadot)


def rhs_scs(state: SystemState, p: ModelParams) -> Derivative:
    """Velocity model: 1/N spatial + velocity-alignment coupling, no radius."""
    if state.model_id != MODEL_SCS:
        raise ValueError(f"expected a {MODEL_SCS} state, got {state.model_id}")
    omega = p.omega_vector(state.n)
    xdot, vdot, xidot = _scs_rates(state.x, state.v, state.xi, p, omega)
    return Derivative(dx=xdot, dxi=xidot, dv=vdot)


def state_dim(model_id: str, n: int) -> int:
    if model_id == MODEL_BASELINE:
        return 3 * n
    if model_id == MODEL_SV:
        return 4 * n
    if model_id == MODEL_SCS:
        return 5 * n
    raise ValueError(f"unknown model_id {model_id!r}")


def pack_state(state: SystemState) -> np.ndarray:
    parts = [state.x.ravel()]
    if state.model_id == MODEL_SV:
        parts.append(state.theta)
    elif state.model_id == MODEL_SCS:
        parts.append(state.v.ravel())
    parts.append(state.xi)
    return np.concatenate(parts)


def unpack_state(model_id: str, n: int, y: np.ndarray, t: float = 0.0) -> SystemState:
    y = np.asarray(y, dtype=float)
    if y.shape != (state_dim(model_id, n),):
        raise ValueError(f"flat state has shape {y.shape}, expected ({state_dim(model_id, n)},)")
    x = y[: 2 * n].copy().reshape(n, 2)
    if model_id == MODEL_SV:
        return SystemState(model_id, x=x, theta=y[2 * n : 3 * n], xi=y[3 * n :], t=t)
    if model_id == MODEL_SCS:
        v = y[2 * n : 4 * n].copy().reshape(n, 2)
        return SystemState(model_id, x=x, v=v, xi=y[4 * n :], t=t)
    return SystemState(model_id, x=x, xi=y[2 * n :], t=t)


def pack_derivative(model_id: str, d: Derivative) -> np.ndarray:
    parts = [d.dx.ravel()]
    if model_id == MODEL_SV:
        parts.append(d.dtheta)
    elif model_id == MODEL_SCS:
        parts.append(d.dv.ravel())
    parts.append(d.dxi)
    return np.concatenate(parts)


class ModelOde:
    """Flat-vector view of a model for the time steppers.

    rhs() is evaluated on the raw flat vector with no angle normalization or
    finiteness checks, so the steppers see NaNs instead of exceptions when a
    run blows up.  For the heading model the neighborhood is recomputed at
    every evaluation point (it depends on positions, and the steppers' error
    control needs the RHS to be a well-defined function of state); with
    freeze_neighbors the snapshot taken by begin_step() is reused across the
    stages of one step instead.

    Instances hold reusable scratch buffers, so share one instance across
    threads only with external locking; independent runs should each build
    their own.
    """

    def __init__(
        self,
        model_id: str,
        n: int,
        params: ModelParams,
        include_self: bool = True,
        freeze_neighbors: bool = False,
    ):
        if model_id not in MODEL_IDS:
            raise ValueError(f"unknown model_id {model_id!r}")
        if model_id == MODEL_SV and (params.r is None or not params.r > 0):
            raise ValueError("heading model needs params.r > 0")
        self.model_id = model_id
        self.n = n
        self.params = params
        self.include_self = include_self
        self.freeze_neighbors = freeze_neighbors and model_id == MODEL_SV
        self.omega = params.omega_vector(n)
        self._ws = _Workspace(n)
        self._adj: np.ndarray | None = None
        self._angle_lo = 2 * n if model_id == MODEL_SV else state_dim(model_id, n) - n
        self._dim = state_dim(model_id, n)

    @property
    def dim(self) -> int:
        return self._dim

    def begin_step(self, y: np.ndarray) -> None:
        """Refresh per-step caches (the frozen neighborhood snapshot)."""
        if self.freeze_neighbors:
            x = y[: 2 * self.n].reshape(self.n, 2)
            nl = neighbor_list(x, self.params.r, self.include_self)
            self._adj = nl.adjacency()

    def rhs(self, y: np.ndarray) -> np.ndarray:
        n = self.n
        x = y[: 2 * n].reshape(n, 2)
        if self.model_id == MODEL_BASELINE:
            xdot, xidot = _baseline_rates(x, y[2 * n :], self.params, self.omega, ws=self._ws)
            return np.concatenate([xdot.ravel(), xidot])
        if self.model_id == MODEL_SCS:
            v = y[2 * n : 4 * n].reshape(n, 2)
            xdot, vdot, xidot = _scs_rates(x, v, y[4 * n :], self.params, self.omega, ws=self._ws)
            return np.concatenate([xdot.ravel(), vdot.ravel(), xidot])
        theta = y[2 * n : 3 * n]
        xdot, thetadot, xidot = _sv_rates(
            x,
            theta,
            y[3 * n :],
            self.params,
            self.omega,
            adj=self._adj if self.freeze_neighbors else None,
            include_self=self.include_self,
            ws=self._ws,
        )
        return np.concatenate([xdot.ravel(), thetadot, xidot])

    def wrap(self, y: np.ndarray) -> np.ndarray:
        """Re-wrap the angle components (heading and phase) to (-pi, pi]."""
        out = y.copy()
        out[self._angle_lo :] = _wrap_unchecked(out[self._angle_lo :])
        return out

    def pack(self, state: SystemState) -> np.ndarray:
        return pack_state(state)

    def unpack(self, y: np.ndarray, t: float = 0.0) -> SystemState:
        return unpack_state(self.model_id, self.n, y, t)
