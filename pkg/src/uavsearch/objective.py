"""Search-revenue terms and the horizon rollout.

A decision's value combines three benefits over the predicted sensor
footprint: probability mass not yet confirmed (target benefit), remaining
uncertainty (exploration benefit), and a virtual-repulsion collision term.
``sequence_revenue`` rolls an action sequence forward through the jump
grid, summing the per-state revenue on a scratch view of the map in which
each predicted footprint decays uncertainty and masks probability, so a
sequence cannot double-count its own coverage.

These are the readable reference implementations; the planner evaluates
whole populations through :mod:`uavsearch.kernels`, which must agree with
this module (checked by the test suite).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import GridPose, step
from .mapping import FootprintCache, SearchMap, grid_to_world, rasterize_fov

__all__ = [
    "Weights",
    "RepulsionParams",
    "target_benefit",
    "uncertainty_benefit",
    "collision_benefit",
    "state_revenue",
    "sequence_revenue",
]


@dataclass
class Weights:
    """Base objective weights plus the online correction coefficients.

    Effective weights are correction * base per term.
    """

    w_prob: float = 10.0
    w_unc: float = 1.0
    w_col: float = 5.0
    k_prob: float = 1.0
    k_unc: float = 1.0
    k_col: float = 1.0

    def effective(self) -> tuple[float, float, float]:
        return (
            self.k_prob * self.w_prob,
            self.k_unc * self.w_unc,
            self.k_col * self.w_col,
        )


@dataclass(frozen=True)
class RepulsionParams:
    """Virtual repulsive force field between vehicles."""

    k: float = 10.0  # force magnitude
    mu: float = 6e-3  # exponential decay per meter
    d_max: float = 200.0  # cutoff distance, meters

    def __post_init__(self):
        if self.k <= 0 or self.mu <= 0 or self.d_max <= 0:
            raise ValueError("repulsion parameters must be positive")


def target_benefit(smap: SearchMap, cells: np.ndarray) -> float:
    """Probability mass over the covered cells, masking latched cells."""
    if len(cells) == 0:
        return 0.0
    ix, iy = cells[:, 0] - 1, cells[:, 1] - 1
    p = smap.probability[ix, iy]
    return float(np.sum(np.where(smap.found[ix, iy], 0.0, p)))


def uncertainty_benefit(smap: SearchMap, cells: np.ndarray) -> float:
    """Uncertainty mass over the covered cells."""
    if len(cells) == 0:
        return 0.0
    return float(np.sum(smap.uncertainty[cells[:, 0] - 1, cells[:, 1] - 1]))


def collision_benefit(
    pos: tuple[float, float],
    peers: np.ndarray,
    params: RepulsionParams,
    zero_dir: tuple[float, float] = (1.0, 0.0),
) -> float:
    """1 minus the magnitude of the summed repulsion from in-range peers.

    A coincident peer (zero separation) has no defined direction; it
    contributes the full force magnitude along ``zero_dir``, which the
    caller draws from its RNG.
    """
    fx = fy = 0.0
    arr = np.asarray(peers, dtype=np.float64).reshape(-1, 2)
    for px, py in arr:
        dx = pos[0] - px
        dy = pos[1] - py
        d = math.hypot(dx, dy)
        if d > params.d_max:
            continue
        if d < 1e-9:
            fx += params.k * zero_dir[0]
            fy += params.k * zero_dir[1]
        else:
            w = params.k * math.exp(-params.mu * d) / d
            fx += w * dx
            fy += w * dy
    return 1.0 - math.hypot(fx, fy)


def state_revenue(
    smap: SearchMap,
    pose: GridPose,
    peers: np.ndarray,
    weights: Weights,
    params: RepulsionParams,
    cache: FootprintCache,
    zero_dir: tuple[float, float] = (1.0, 0.0),
) -> float:
    """Weighted single-state revenue at a (valid, in-bounds) pose."""
    wp, we, wc = weights.effective()
    cells = rasterize_fov(*grid_to_world(pose.x_g, pose.y_g, smap.spec), pose.heading, smap.spec, cache)
    jp = target_benefit(smap, cells)
    je = uncertainty_benefit(smap, cells)
    jc = collision_benefit(grid_to_world(pose.x_g, pose.y_g, smap.spec), peers, params, zero_dir)
    return wp * jp + we * je + wc * jc


def sequence_revenue(
    smap: SearchMap,
    pose: GridPose,
    actions,
    j: int,
    peers: np.ndarray,
    weights: Weights,
    params: RepulsionParams,
    cache: FootprintCache,
    denied: np.ndarray | None = None,
    zero_dir: tuple[float, float] = (1.0, 0.0),
) -> float:
    """Total predicted revenue of an action sequence from a start pose.

    Each predicted footprint decays the scratch uncertainty by half and
    masks the probability it has already banked, so revisiting cells within
    one horizon earns strictly less.  A predicted position out of bounds or
    inside a denied cell makes the whole sequence infeasible: the return
    value is the sentinel -(1 + number of violating steps), never a valid
    revenue.
    """
    wp, we, wc = weights.effective()
    spec = smap.spec
    cov: dict[tuple[int, int], int] = {}
    total = 0.0
    violations = 0
    cur = pose
    for u in actions:
        cur = step(cur, int(u), j)
        if not spec.in_bounds_cell(cur.x_g, cur.y_g) or (
            denied is not None and denied[cur.x_g - 1, cur.y_g - 1]
        ):
            violations += 1
            continue
        if violations:
            continue  # revenue is discarded once the sequence is infeasible
        jp = je = 0.0
        x, y = grid_to_world(cur.x_g, cur.y_g, spec)
        for cx, cy in rasterize_fov(x, y, cur.heading, spec, cache):
            key = (int(cx), int(cy))
            cnt = cov.get(key, 0)
            if cnt == 0 and not smap.found[cx - 1, cy - 1]:
                jp += smap.probability[cx - 1, cy - 1]
            je += smap.uncertainty[cx - 1, cy - 1] * 0.5**cnt
            cov[key] = cnt + 1
        jc = collision_benefit((x, y), peers, params, zero_dir)
        total += wp * jp + we * je + wc * jc
    if violations:
        return -(1.0 + violations)
    return total
