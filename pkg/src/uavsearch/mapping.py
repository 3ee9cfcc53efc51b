"""Rasterized task area and per-UAV belief layers.

Each UAV privately owns a :class:`SearchMap` holding a target-existence
probability layer, an environmental-uncertainty layer, and a per-cell
found latch.  This module also owns the sensor-footprint rasterization,
the Bayesian detection update, and the denied-area geometry (static or
moving, circular or polygonal).

Cells are 1-based: ``x_g`` in 1..cells_x, ``y_g`` in 1..cells_y; the cell
``(x_g, y_g)`` has its center at ``(r*(x_g-0.5), r*(y_g-0.5))`` meters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BoundsError, ValidationError
from .geometry import GridPose

__all__ = [
    "GridSpec",
    "SearchMap",
    "Target",
    "DeniedArea",
    "FovGeometry",
    "FootprintCache",
    "FootprintResult",
    "grid_to_world",
    "world_to_grid",
    "init_probability",
    "bayes_update",
    "rasterize_fov",
    "apply_detection_events",
    "apply_detection_footprint",
    "advance_denied_areas",
    "denied_mask",
]

# Incremented whenever a Bayesian update denominator is clamped; cannot
# trigger for valid (0 < p_false < p_detect <= 1) inputs.
NUMERICAL_ANOMALIES = 0


@dataclass(frozen=True)
class GridSpec:
    """Square-cell raster of the rectangular task area."""

    r: float  # cell side length, meters
    cells_x: int
    cells_y: int

    def __post_init__(self):
        if self.r <= 0:
            raise ValidationError(f"cell size must be positive, got {self.r}")
        if self.cells_x < 1 or self.cells_y < 1:
            raise ValidationError("grid must have at least one cell per axis")

    @property
    def width(self) -> float:
        return self.cells_x * self.r

    @property
    def height(self) -> float:
        return self.cells_y * self.r

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """Center coordinate vectors (xs over columns, ys over rows)."""
        xs = self.r * (np.arange(1, self.cells_x + 1, dtype=np.float64) - 0.5)
        ys = self.r * (np.arange(1, self.cells_y + 1, dtype=np.float64) - 0.5)
        return xs, ys

    def in_bounds_cell(self, x_g: int, y_g: int) -> bool:
        return 1 <= x_g <= self.cells_x and 1 <= y_g <= self.cells_y


def grid_to_world(x_g: int, y_g: int, spec: GridSpec) -> tuple[float, float]:
    """World coordinates of a cell center; raises on an out-of-range cell."""
    if not spec.in_bounds_cell(x_g, y_g):
        raise BoundsError(f"cell ({x_g}, {y_g}) outside grid {spec.cells_x}x{spec.cells_y}")
    return spec.r * (x_g - 0.5), spec.r * (y_g - 0.5)


def world_to_grid(x: float, y: float, spec: GridSpec) -> tuple[int, int]:
    """Cell containing a world position; positions exactly on the far edge
    belong to the last cell."""
    x_g = int(x // spec.r) + 1
    y_g = int(y // spec.r) + 1
    if x_g == spec.cells_x + 1 and x == spec.width:
        x_g = spec.cells_x
    if y_g == spec.cells_y + 1 and y == spec.height:
        y_g = spec.cells_y
    if not spec.in_bounds_cell(x_g, y_g):
        raise BoundsError(f"position ({x}, {y}) outside the task area")
    return x_g, y_g


@dataclass
class Target:
    """Ground-truth target plus the prior belief about its location."""

    id: int
    position: tuple[float, float]  # true location, meters
    prior: tuple[float, float]  # believed location before the search
    peak: float = 0.3  # initial probability peak height
    width: float = 50.0  # Gaussian peak width, meters
    discovered: bool = False
    discovered_at: float = -1.0  # seconds; -1 until discovered


@dataclass
class SearchMap:
    """One UAV's private belief about the task area.

    ``probability`` and ``uncertainty`` are (cells_x, cells_y) float64
    layers in [0, 1]; ``found`` latches permanently once a cell's
    probability reaches the found threshold.
    """

    spec: GridSpec
    probability: np.ndarray
    uncertainty: np.ndarray
    found: np.ndarray
    owner: int = 0

    @classmethod
    def blank(cls, spec: GridSpec, owner: int = 0) -> "SearchMap":
        shape = (spec.cells_x, spec.cells_y)
        return cls(
            spec=spec,
            probability=np.zeros(shape, dtype=np.float64),
            uncertainty=np.ones(shape, dtype=np.float64),
            found=np.zeros(shape, dtype=bool),
            owner=owner,
        )

    def clone(self, owner: int | None = None) -> "SearchMap":
        return SearchMap(
            spec=self.spec,
            probability=self.probability.copy(),
            uncertainty=self.uncertainty.copy(),
            found=self.found.copy(),
            owner=self.owner if owner is None else owner,
        )


def init_probability(
    spec: GridSpec, priors: list[tuple[tuple[float, float], float, float]], owner: int = 0
) -> SearchMap:
    """Fresh map seeded with Gaussian probability peaks at the prior positions.

    Each prior is ((x, y), peak, width); the peak contributes
    peak * exp(-((x-px)^2 + (y-py)^2) / width^2) at every cell center.
    Overlapping peaks are summed then clamped to 1.  Uncertainty starts at 1
    everywhere and nothing is found.
    """
    problems = []
    for i, ((px, py), peak, width) in enumerate(priors):
        if not (0.0 <= px <= spec.width and 0.0 <= py <= spec.height):
            problems.append(f"prior {i} at ({px}, {py}) outside the task area")
        if not 0.0 < peak <= 1.0:
            problems.append(f"prior {i} peak {peak} outside (0, 1]")
        if width <= 0.0:
            problems.append(f"prior {i} width {width} must be positive")
    if problems:
        raise ValidationError(problems)

    smap = SearchMap.blank(spec, owner=owner)
    xs, ys = spec.cell_centers()
    gx = xs[:, None]
    gy = ys[None, :]
    for (px, py), peak, width in priors:
        smap.probability += peak * np.exp(-((gx - px) ** 2 + (gy - py) ** 2) / width**2)
    np.clip(smap.probability, 0.0, 1.0, out=smap.probability)
    return smap


def bayes_update(p: float, detection: bool, p_detect: float, p_false: float) -> float:
    """Posterior cell probability after one sensor pass.

    detection=True:  p' = p_detect*p / (p_false + (p_detect - p_false)*p)
    detection=False: p' = (1-p_detect)*p / (1 - p_detect*p - p_false*(1-p))

    Both branches map [0,1] into [0,1] and are monotone in p for
    0 < p_false < p_detect <= 1.
    """
    global NUMERICAL_ANOMALIES
    if detection:
        num = p_detect * p
        den = p_false + (p_detect - p_false) * p
    else:
        num = (1.0 - p_detect) * p
        den = 1.0 - p_detect * p - p_false * (1.0 - p)
    if den <= 0.0:
        NUMERICAL_ANOMALIES += 1
        return min(max(p, 0.0), 1.0)
    return min(max(num / den, 0.0), 1.0)


def _bayes_update_cells(p: np.ndarray, detection: np.ndarray, p_detect: float, p_false: float) -> np.ndarray:
    """Vectorized form of :func:`bayes_update` over parallel cell vectors."""
    global NUMERICAL_ANOMALIES
    up = p_detect * p / (p_false + (p_detect - p_false) * p)
    down_den = 1.0 - p_detect * p - p_false * (1.0 - p)
    bad = down_den <= 0.0
    if np.any(bad):
        NUMERICAL_ANOMALIES += int(np.count_nonzero(bad & ~detection))
    down = np.where(bad, p, (1.0 - p_detect) * p / np.where(bad, 1.0, down_den))
    return np.clip(np.where(detection, up, down), 0.0, 1.0)


@dataclass(frozen=True)
class FovGeometry:
    """Rectangular sensor footprint: extent along/across the heading, with
    the rectangle center pushed forward of the vehicle by ``lead`` meters."""

    along: float
    across: float
    lead: float = 0.0


class FootprintCache:
    """Cell offsets covered by an oriented footprint, cached per heading.

    Offsets are relative to the vehicle's cell and are exact for poses at
    cell centers.  Headings are quantized to float32 before lookup so live
    sensing and remote replay of the same wire-format pose rasterize the
    identical cell set.  Inclusion is half-open ([-w/2, w/2) along both
    rectangle axes) so an axis-aligned footprint covers exactly
    (along/r) x (across/r) cells.
    """

    def __init__(self, geom: FovGeometry, r: float):
        self.geom = geom
        self.r = r
        self._cache: dict[np.float32, tuple[np.ndarray, np.ndarray]] = {}
        reach = geom.lead + math.hypot(geom.along, geom.across) / 2.0
        self._bound = int(math.ceil(reach / r)) + 1

    def offsets(self, heading: float) -> tuple[np.ndarray, np.ndarray]:
        key = np.float32(heading)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        h = math.radians(float(key))
        ux, uy = math.cos(h), math.sin(h)
        b = self._bound
        dxs = np.arange(-b, b + 1, dtype=np.int64)
        gx, gy = np.meshgrid(dxs, dxs, indexing="ij")
        wx = gx * self.r
        wy = gy * self.r
        proj_u = wx * ux + wy * uy - self.geom.lead
        proj_v = -wx * uy + wy * ux
        ha = self.geom.along / 2.0
        hc = self.geom.across / 2.0
        mask = (proj_u >= -ha) & (proj_u < ha) & (proj_v >= -hc) & (proj_v < hc)
        hit = (gx[mask].copy(), gy[mask].copy())
        self._cache[key] = hit
        return hit

    @property
    def max_cells(self) -> int:
        side = 2 * self._bound + 1
        return side * side


def rasterize_fov(
    x: float, y: float, heading: float, spec: GridSpec, cache: FootprintCache
) -> np.ndarray:
    """Cells covered by the footprint at a pose, clipped to the grid.

    Returns an (n, 2) int array of 1-based (x_g, y_g) cells.
    """
    bx, by = world_to_grid(x, y, spec)
    dx, dy = cache.offsets(heading)
    cx = bx + dx
    cy = by + dy
    ok = (cx >= 1) & (cx <= spec.cells_x) & (cy >= 1) & (cy <= spec.cells_y)
    return np.stack([cx[ok], cy[ok]], axis=1)


@dataclass
class FootprintResult:
    """Outcome of one sensor pass: the covered cells, the per-cell detection
    draws, newly discovered targets, and the uncertainty mass removed."""

    cells: np.ndarray  # (n, 2) covered cells
    detections: np.ndarray  # (n,) bool sensor outcomes
    discovered: list[Target] = field(default_factory=list)
    uncertainty_drop: float = 0.0


def apply_detection_events(
    smap: SearchMap,
    cells: np.ndarray,
    detections: np.ndarray,
    p_detect: float,
    p_false: float,
    found_threshold: float,
) -> tuple[np.ndarray, float]:
    """Fold already-drawn sensor outcomes into a map.

    The probability layer takes the Bayesian update per cell, uncertainty
    halves, and any cell whose posterior reaches the found threshold
    latches.  Returns (latched mask over the cells, uncertainty mass
    removed).  Shared by live sensing, the engine's ground-truth mirror,
    and nothing else; remote replay applies its own inferred outcomes.
    """
    if len(cells) == 0:
        return np.zeros(0, dtype=bool), 0.0
    ix = cells[:, 0] - 1
    iy = cells[:, 1] - 1
    p_after = _bayes_update_cells(smap.probability[ix, iy], detections, p_detect, p_false)
    smap.probability[ix, iy] = p_after
    chi_before = smap.uncertainty[ix, iy]
    smap.uncertainty[ix, iy] = 0.5 * chi_before
    latched = (p_after >= found_threshold) & ~smap.found[ix, iy]
    smap.found[ix, iy] |= latched
    return latched, float(np.sum(chi_before * 0.5))


def apply_detection_footprint(
    smap: SearchMap,
    cells: np.ndarray,
    target_cells: dict[tuple[int, int], list[Target]],
    p_detect: float,
    p_false: float,
    found_threshold: float,
    rng: np.random.Generator,
    t: float,
) -> FootprintResult:
    """Run the sensor over a covered cell set and fold the result into the map.

    Every covered cell gets an independent Bernoulli draw: a true positive
    with probability p_detect where a target sits, a false alarm with
    probability p_false elsewhere.  If a true target occupies a cell that
    latches on this pass, the target is marked discovered at time t.
    """
    if len(cells) == 0:
        return FootprintResult(cells=cells, detections=np.zeros(0, dtype=bool))

    has_target = np.fromiter(
        ((int(cx), int(cy)) in target_cells for cx, cy in cells), dtype=bool, count=len(cells)
    )
    draws = rng.random(len(cells))
    detections = draws < np.where(has_target, p_detect, p_false)
    latched, drop = apply_detection_events(smap, cells, detections, p_detect, p_false, found_threshold)

    discovered: list[Target] = []
    for k in np.nonzero(latched & has_target)[0]:
        for tgt in target_cells[(int(cells[k, 0]), int(cells[k, 1]))]:
            if not tgt.discovered:
                tgt.discovered = True
                tgt.discovered_at = float(t)
                discovered.append(tgt)
    return FootprintResult(cells=cells, detections=detections, discovered=discovered, uncertainty_drop=drop)


@dataclass
class DeniedArea:
    """No-fly region: a circle (center + radius) or a polygon (vertices),
    optionally drifting at a constant velocity with reflective bounces off
    the task-area boundary."""

    center: np.ndarray
    radius: float = 0.0
    vertices: np.ndarray | None = None
    velocity: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=np.float64)
        self.velocity = np.asarray(self.velocity, dtype=np.float64)
        if self.vertices is not None:
            self.vertices = np.asarray(self.vertices, dtype=np.float64)
            if len(self.vertices) < 3:
                raise ValidationError("polygonal denied area needs at least 3 vertices")
        elif self.radius <= 0:
            raise ValidationError("circular denied area needs a positive radius")

    def contains(self, x: float, y: float) -> bool:
        if self.vertices is None:
            dx = x - self.center[0]
            dy = y - self.center[1]
            return dx * dx + dy * dy <= self.radius * self.radius
        return _point_in_polygon(x, y, self.vertices)

    def contains_mask(self, gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
        """Vectorized membership over broadcastable coordinate arrays."""
        if self.vertices is None:
            return (gx - self.center[0]) ** 2 + (gy - self.center[1]) ** 2 <= self.radius**2
        return _points_in_polygon(gx, gy, self.vertices)

    def boundary_distance(self, x: float, y: float) -> float:
        """Signed distance to the area edge: positive outside, negative inside."""
        if self.vertices is None:
            return math.hypot(x - self.center[0], y - self.center[1]) - self.radius
        d = _polygon_edge_distance(x, y, self.vertices)
        return -d if _point_in_polygon(x, y, self.vertices) else d


def _point_in_polygon(x: float, y: float, verts: np.ndarray) -> bool:
    inside = False
    n = len(verts)
    for i in range(n):
        x1, y1 = verts[i]
        x2, y2 = verts[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            xc = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < xc:
                inside = not inside
    return inside


def _points_in_polygon(gx: np.ndarray, gy: np.ndarray, verts: np.ndarray) -> np.ndarray:
    gx, gy = np.broadcast_arrays(gx, gy)
    inside = np.zeros(gx.shape, dtype=bool)
    n = len(verts)
    for i in range(n):
        x1, y1 = verts[i]
        x2, y2 = verts[(i + 1) % n]
        crosses = (y1 > gy) != (y2 > gy)
        with np.errstate(divide="ignore", invalid="ignore"):
            xc = x1 + (gy - y1) * (x2 - x1) / (y2 - y1)
        inside ^= crosses & (gx < xc)
    return inside


def _polygon_edge_distance(x: float, y: float, verts: np.ndarray) -> float:
    best = math.inf
    n = len(verts)
    for i in range(n):
        x1, y1 = verts[i]
        x2, y2 = verts[(i + 1) % n]
        ex, ey = x2 - x1, y2 - y1
        ll = ex * ex + ey * ey
        tt = 0.0 if ll == 0 else max(0.0, min(1.0, ((x - x1) * ex + (y - y1) * ey) / ll))
        best = min(best, math.hypot(x - (x1 + tt * ex), y - (y1 + tt * ey)))
    return best


def advance_denied_areas(areas: list[DeniedArea], dt: float, spec: GridSpec) -> None:
    """Drift moving areas by velocity*dt, reflecting off the task-area
    boundary component-wise (the center bounces at the walls)."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    for area in areas:
        if not np.any(area.velocity):
            continue
        old = area.center.copy()
        for axis, limit in ((0, spec.width), (1, spec.height)):
            c = area.center[axis] + area.velocity[axis] * dt
            if c < 0.0:
                c = -c
                area.velocity[axis] = -area.velocity[axis]
            elif c > limit:
                c = 2.0 * limit - c
                area.velocity[axis] = -area.velocity[axis]
            area.center[axis] = c
        if area.vertices is not None:
            area.vertices += area.center - old


def denied_mask(areas: list[DeniedArea], spec: GridSpec) -> np.ndarray:
    """Boolean (cells_x, cells_y) mask of cell centers inside any area."""
    mask = np.zeros((spec.cells_x, spec.cells_y), dtype=bool)
    if not areas:
        return mask
    xs, ys = spec.cell_centers()
    gx = xs[:, None]
    gy = ys[None, :]
    for area in areas:
        mask |= area.contains_mask(gx, gy)
    return mask
