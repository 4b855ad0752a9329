"""Fixed-radius neighbor queries: a naive reference and a uniform-grid version.

Both return the same closed-ball neighborhoods (distance <= radius, squared
distances compared so no square roots are taken), so the grid path is tested
for exact set equality against the naive one.  Queries are read-only over an
immutable position snapshot and safe to run concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class NeighborList:
    """Per-agent sorted index lists for one fixed query radius.

    For every i, j in lists[i] iff ||x_j - x_i|| <= radius, with j == i
    included iff include_self.  Lists are ascending with no duplicates and
    symmetric across pairs.
    """

    lists: list[np.ndarray]
    radius: float
    include_self: bool

    @property
    def n(self) -> int:
        return len(self.lists)

    def counts(self) -> np.ndarray:
        return np.array([len(l) for l in self.lists], dtype=int)

    def adjacency(self) -> np.ndarray:
        """Dense (N, N) boolean membership matrix."""
        n = self.n
        adj = np.zeros((n, n), dtype=bool)
        for i, idx in enumerate(self.lists):
            adj[i, idx] = True
        return adj


def _check_inputs(positions: np.ndarray, radius: float) -> np.ndarray:
    positions = np.asarray(positions, dtype=float)
    positions = np.atleast_2d(positions)
    if positions.ndim != 2 or positions.shape[1] != 2:
        raise ValueError(f"positions must be (N, 2), got {positions.shape}")
    if not np.all(np.isfinite(positions)):
        raise ValueError("positions contain non-finite coordinates")
    if not (radius > 0.0):
        raise ValueError(f"radius must be > 0, got {radius}")
    return positions


def neighbors_naive(positions, radius: float, include_self: bool = True) -> NeighborList:
    """Exact O(N^2) pair scan; the reference the grid version is checked against."""
    positions = _check_inputs(positions, radius)
    n = positions.shape[0]
    r2 = radius * radius
    lists = []
    for i in range(n):
        d = positions - positions[i]
        d2 = d[:, 0] * d[:, 0] + d[:, 1] * d[:, 1]
        mask = d2 <= r2
        if not include_self:
            mask[i] = False
        lists.append(np.flatnonzero(mask))
    return NeighborList(lists=lists, radius=float(radius), include_self=include_self)


def neighbors_grid(positions, radius: float, include_self: bool = True) -> NeighborList:
    """Uniform-grid accelerated query, identical output to neighbors_naive.

    Agents are bucketed into square cells of side = radius; any neighbor
    within the radius then lies in the 3x3 cell stencil around an agent's
    own cell.  The final distance filter is the same squared-distance
    comparison the naive scan uses.
    """
    positions = _check_inputs(positions, radius)
    n = positions.shape[0]
    r2 = radius * radius

    cells_of = np.floor(positions / radius).astype(np.int64)
    buckets: dict[tuple[int, int], list[int]] = {}
    for i, (cx, cy) in enumerate(cells_of):
        buckets.setdefault((int(cx), int(cy)), []).append(i)

    # candidate indices per cell: the cell's own bucket plus 8 surrounding ones
    stencil_cache: dict[tuple[int, int], np.ndarray] = {}

    def stencil(cx: int, cy: int) -> np.ndarray:
        key = (cx, cy)
        cached = stencil_cache.get(key)
        if cached is not None:
            return cached
        cand: list[int] = []
        for ox in (-1, 0, 1):
            for oy in (-1, 0, 1):
                cand.extend(buckets.get((cx + ox, cy + oy), ()))
        out = np.array(sorted(cand), dtype=np.int64)
        stencil_cache[key] = out
        return out

    lists = []
    for i in range(n):
        cand = stencil(int(cells_of[i, 0]), int(cells_of[i, 1]))
        d = positions[cand] - positions[i]
        d2 = d[:, 0] * d[:, 0] + d[:, 1] * d[:, 1]
        mask = d2 <= r2
        if not include_self:
            mask[cand == i] = False
        lists.append(cand[mask])
    return NeighborList(lists=lists, radius=float(radius), include_self=include_self)


def neighbor_list(positions, radius, include_self=True, method="auto") -> NeighborList:
    """Build a NeighborList, choosing the grid path for larger populations."""
    if method == "naive":
        return neighbors_naive(positions, radius, include_self)
    if method == "grid":
        return neighbors_grid(positions, radius, include_self)
    if method != "auto":
        raise ValueError(f"unknown neighbor search method {method!r}")
    n = np.asarray(positions).shape[0]
    if n > 400:
        return neighbors_grid(positions, radius, include_self)
    return neighbors_naive(positions, radius, include_self)
