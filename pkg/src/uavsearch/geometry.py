"""Jump-grid kinematics.

A UAV moving on a square grid advances one ring per decision: from its
current cell it jumps to a cell on the ring of Chebyshev radius ``j`` (the
jump value), so larger ``j`` means a faster implied speed and a wider
turning radius.  Cells on the ring are numbered ``n`` counter-clockwise in
``(-4j, 4j]`` with ``n = 0`` straight ahead and ``n = 4j`` straight behind;
a turn action u in {-1, 0, +1} shifts the ring number by one slot.  This
module holds the pure math: number/heading conversion, per-number
coordinate increments, turning radius/angle, lateral-acceleration
coefficients, and the feasibility window for ``j`` implied by a vehicle's
speed and acceleration envelope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GridPose",
    "normalize_heading",
    "turning_radius",
    "turning_angle",
    "acceleration_coeff",
    "lateral_acceleration",
    "grid_supports_acceleration",
    "feasible_j_values",
    "heading_to_number",
    "wrap_number",
    "number_to_increment",
    "increment_tables",
    "slot_heading",
    "step",
]

# Peak of the acceleration coefficient, reached at n=1 for every j.
MAX_ACCEL_COEFF = math.sqrt(2.0) * math.pi / 4.0


@dataclass(frozen=True)
class GridPose:
    """Cell coordinates (1-based) plus a continuous heading in degrees."""

    x_g: int
    y_g: int
    heading: float  # degrees, folded into [-180, 180)


def normalize_heading(deg: float) -> float:
    """Fold an angle into [-180, 180) degrees."""
    h = math.fmod(deg + 180.0, 360.0)
    if h < 0.0:
        h += 360.0
    return h - 180.0


def turning_radius(j: int, r: float) -> float:
    """Radius in meters of the near-circular loop traced by turning one way
    at every step: R = (0.5*(j+1)^2 + j*(j-1)) * r."""
    if j < 1:
        raise ValueError(f"jump value must be >= 1, got {j}")
    return (0.5 * (j + 1) ** 2 + j * (j - 1)) * r


def _deg_atan(t: float) -> float:
    return math.degrees(math.atan(t))


def turning_angle(j: int, n: int) -> float:
    """Heading change in degrees between ring slots n-1 and n, for n in [1, j].

    Computed as atan(n/j) - atan((n-1)/j); the slot angles telescope so the
    sum over n = 1..j is exactly 45 degrees.
    """
    if not 1 <= n <= j:
        raise ValueError(f"slot n must lie in [1, {j}], got {n}")
    return _deg_atan(n / j) - _deg_atan((n - 1) / j)


def acceleration_coeff(j: int, n: int) -> float:
    """Dimensionless lateral-acceleration coefficient for the turn into slot n.

    k_a = sqrt(j^2 + n^2) * (atan(n/j) - atan((n-1)/j)), with the atan terms
    in radians.  The lateral acceleration itself is k_a * r / dt^2.  The
    maximum over n is at n = 1 and never exceeds sqrt(2)*pi/4.
    """
    if not 1 <= n <= j:
        raise ValueError(f"slot n must lie in [1, {j}], got {n}")
    return math.sqrt(j * j + n * n) * (math.atan(n / j) - math.atan((n - 1) / j))


def lateral_acceleration(j: int, n: int, r: float, dt: float) -> float:
    """Lateral acceleration in m/s^2 implied by turning into slot n."""
    return acceleration_coeff(j, n) * r / (dt * dt)


def grid_supports_acceleration(r: float, dt: float, a_max: float) -> bool:
    """Whether the worst-case turn fits the acceleration envelope:
    sqrt(2)*pi/4 * r / dt^2 < a_max."""
    return MAX_ACCEL_COEFF * r / (dt * dt) < a_max


def feasible_j_values(
    v_min: float, v_max: float, a_max: float, r: float, dt: float
) -> list[int]:
    """Integer jump values compatible with a vehicle's envelope.

    The speed window requires v_min*dt/r < j < sqrt(2)*v_max*dt/(2r); each
    surviving j must additionally satisfy R(j) > V^2/a_max where V is the
    fastest per-step speed at that j (the diagonal slot, V = sqrt(2)*j*r/dt).
    Returns an empty list when no j qualifies.
    """
    if r <= 0 or dt <= 0:
        raise ValueError("grid size and decision interval must be positive")
    lo = v_min * dt / r
    hi = math.sqrt(2.0) * v_max * dt / (2.0 * r)
    j_lo = max(1, math.floor(lo) + 1)
    j_hi = math.ceil(hi) - 1
    out = []
    for j in range(j_lo, j_hi + 1):
        v_step = math.sqrt(2.0) * j * r / dt
        if turning_radius(j, r) > v_step * v_step / a_max:
            out.append(j)
    return out


def heading_to_number(heading: float, j: int) -> int:
    """Ring number whose heading interval contains the given heading.

    Slot n owns headings in [45(2n-1)/(2j), 45(2n+1)/(2j)), low-inclusive;
    the rear direction is canonicalized to +4j, so results lie in (-4j, 4j].
    """
    h = normalize_heading(heading)
    n = math.floor(h * j / 45.0 + 0.5)
    if n <= -4 * j:
        n += 8 * j
    return n


def wrap_number(n: int, j: int) -> int:
    """Fold a ring number into the canonical interval (-4j, 4j]."""
    span = 8 * j
    while n > 4 * j:
        n -= span
    while n <= -4 * j:
        n += span
    return n


def number_to_increment(n: int, j: int) -> tuple[int, int]:
    """Cell-coordinate increment (dx, dy) for landing on ring slot n.

    Piecewise over the four ring sides; adjacent branches agree at shared
    endpoints, and every increment has Chebyshev norm exactly j.
    """
    if not -4 * j <= n <= 4 * j:
        raise ValueError(f"ring number {n} outside [-4j, 4j] for j={j}")
    if n <= -3 * j:
        return -j, -n - 4 * j
    if n <= -j:
        return 2 * j + n, -j
    if n <= j:
        return j, n
    if n <= 3 * j:
        return 2 * j - n, j
    return -j, -n + 4 * j


def increment_tables(j: int) -> tuple[np.ndarray, np.ndarray]:
    """Increment lookup arrays indexed by n + 4j - 1 for n in (-4j, 4j]."""
    size = 8 * j
    inc_x = np.empty(size, dtype=np.int64)
    inc_y = np.empty(size, dtype=np.int64)
    for idx in range(size):
        n = idx - 4 * j + 1
        inc_x[idx], inc_y[idx] = number_to_increment(n, j)
    return inc_x, inc_y


def slot_heading(n: int, j: int) -> float:
    """Canonical heading of ring slot n: the center of its heading interval.

    For j >= 6 the raw displacement direction atan2(dy, dx) can drift out
    of the slot's own interval (the slots are uniformly spaced in angle but
    ring-cell directions are not), so poses carry the slot-center heading
    to keep number and heading permanently in sync.
    """
    return normalize_heading(45.0 * n / j)


def step(pose: GridPose, u: int, j: int) -> GridPose:
    """Advance one decision step: shift the ring number by u and land on the
    corresponding ring cell.  The new heading is the landing slot's
    canonical heading, so ``heading_to_number`` always recovers the slot.

    Bounds are not checked here; feasibility is the planner's concern.
    """
    if u not in (-1, 0, 1):
        raise ValueError(f"action must be -1, 0 or +1, got {u}")
    n = heading_to_number(pose.heading, j)
    n2 = wrap_number(n + u, j)
    dx, dy = number_to_increment(n2, j)
    return GridPose(pose.x_g + dx, pose.y_g + dy, slot_heading(n2, j))
