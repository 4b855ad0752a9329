"""Hand-rolled SVG scatter plots of trajectory samples.

Two modes: "spatial" plots agent positions colored by phase through a cyclic
hue map; "psi-xi" plots angular position about the centroid against phase,
colored by heading (or velocity angle).  One <circle> element per agent;
titles carry the run parameters and the sample time actually used.
"""

from __future__ import annotations

import colorsys
import math
from pathlib import Path

import numpy as np

from . import __version__
from .core import MODEL_SCS, MODEL_SV, _wrap_unchecked
from .integrators import Trajectory
from .observables import psi_angles

SIZE = 640
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 60, 20, 40, 45
POINT_RADIUS = 3.0
MODES = ("spatial", "psi-xi")


def angle_color(angle: float) -> str:
    """Cyclic hue map: equal angles (mod 2*pi) get identical colors."""
    hue = (float(_wrap_unchecked(angle)) + math.pi) / (2.0 * math.pi)
    r, g, b = colorsys.hsv_to_rgb(hue % 1.0, 0.85, 0.92)
    return f"#{round(r * 255):02x}{round(g * 255):02x}{round(b * 255):02x}"


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    return [lo + (hi - lo) * k / (count - 1) for k in range(count)]


def render_scatter(traj: Trajectory, mode: str, at: float, path) -> Path:
    """Render one sample of the trajectory to an SVG file.

    The sample nearest to the requested time is used and recorded in the
    figure title.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if traj.n_samples == 0:
        raise ValueError("cannot plot an empty trajectory")
    k = int(np.argmin(np.abs(traj.times - at)))
    state = traj.state(k)
    t_used = float(traj.times[k])

    if mode == "spatial":
        px, py = state.x[:, 0], state.x[:, 1]
        color_angles = state.xi
        lo = min(px.min(), py.min())
        hi = max(px.max(), py.max())
        pad = 0.05 * max(hi - lo, 1e-9)
        x_range = y_range = (lo - pad, hi + pad)
        x_label, y_label = "x", "y"
    else:
        px = psi_angles(state.x)
        py = state.xi
        if state.model_id == MODEL_SV:
            color_angles = state.theta
        elif state.model_id == MODEL_SCS:
            color_angles = np.arctan2(state.v[:, 1], state.v[:, 0])
        else:
            color_angles = state.xi
        x_range = y_range = (-math.pi, math.pi)
        x_label, y_label = "psi", "xi"

    plot_w = SIZE - MARGIN_L - MARGIN_R
    plot_h = SIZE - MARGIN_T - MARGIN_B

    def sx(v):
        return MARGIN_L + (v - x_range[0]) / (x_range[1] - x_range[0]) * plot_w

    def sy(v):
        return MARGIN_T + plot_h - (v - y_range[0]) / (y_range[1] - y_range[0]) * plot_h

    p = traj.params
    title = (
        f"{traj.model_id} {mode} at t={t_used:g} (requested {at:g}) | "
        f"r={p.r if p.r is not None else 'n/a'} J={p.J:g} K={p.K:g} "
        f"N={traj.n} T={traj.times[-1]:g}"
    )

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">',
        f"<title>{title}</title>",
        f"<desc>swarmflock {__version__}</desc>",
        f'<rect width="{SIZE}" height="{SIZE}" fill="white"/>',
        f'<text x="{SIZE / 2:.1f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13">{title}</text>',
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="black" stroke-width="1"/>',
    ]
    for tick in _ticks(*x_range):
        tx = sx(tick)
        parts.append(
            f'<line x1="{tx:.2f}" y1="{MARGIN_T + plot_h}" x2="{tx:.2f}" '
            f'y2="{MARGIN_T + plot_h + 5}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{tx:.2f}" y="{MARGIN_T + plot_h + 18}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{tick:.3g}</text>'
        )
    for tick in _ticks(*y_range):
        ty = sy(tick)
        parts.append(
            f'<line x1="{MARGIN_L - 5}" y1="{ty:.2f}" x2="{MARGIN_L}" y2="{ty:.2f}" '
            f'stroke="black"/>'
        )
        parts.append(
            f'<text x="{MARGIN_L - 8}" y="{ty + 4:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{tick:.3g}</text>'
        )
    parts.append(
        f'<text x="{MARGIN_L + plot_w / 2:.1f}" y="{SIZE - 8}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">{x_label}</text>'
    )
    parts.append(
        f'<text x="16" y="{MARGIN_T + plot_h / 2:.1f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 16 {MARGIN_T + plot_h / 2:.1f})">{y_label}</text>'
    )
    for i in range(traj.n):
        parts.append(
            f'<circle cx="{sx(px[i]):.2f}" cy="{sy(py[i]):.2f}" r="{POINT_RADIUS}" '
            f'fill="{angle_color(color_angles[i])}" fill-opacity="0.85"/>'
        )
    parts.append("</svg>")

    path = Path(path)
    path.write_text("\n".join(parts) + "\n")
    return path
