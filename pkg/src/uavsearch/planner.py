"""Per-vehicle receding-horizon decision engine.

Each decision re-optimizes a length-m action sequence over {-1, 0, +1}
(left, straight, right) with a genetic algorithm and executes only the
first action.  Sequences whose predicted positions leave the area or enter
a blocked cell score a negative sentinel, -(1 + violating steps), steering
the GA toward feasible space; if no sequence scores positive at the
current jump value the planner retries at j-1, down to j = 1 (a slower,
tighter-turning vehicle can dodge what a fast one cannot).  Only when even
j = 1 admits no violation-free sequence does the planner fall back to an
emergency action: the single step whose successor maximizes clearance from
the nearest threat.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .geometry import GridPose, heading_to_number, increment_tables, slot_heading
from .mapping import DeniedArea, FootprintCache, GridSpec

__all__ = [
    "GaConfig",
    "GaResult",
    "Decision",
    "PlanProblem",
    "ga_optimize",
    "decide",
    "relay_plan",
    "emergency_action",
]


@dataclass(frozen=True)
class GaConfig:
    """Genetic-algorithm knobs: population, budget, operator rates, the
    relative-improvement termination threshold, and the elite count."""

    population: int = 100
    generations: int = 50
    mutation: float = 0.5
    crossover: float = 0.5
    eps: float = 1e-3
    elite: int = 1

    def __post_init__(self):
        if self.population < 2:
            raise ValueError("population must be at least 2")
        if not (0.0 <= self.mutation <= 1.0 and 0.0 <= self.crossover <= 1.0):
            raise ValueError("operator rates must lie in [0, 1]")
        if not 1 <= self.elite < self.population:
            raise ValueError("elite count must be in [1, population)")


@dataclass
class GaResult:
    best_genome: np.ndarray
    best_fitness: float
    best_violations: int
    best_feasible_genome: np.ndarray | None
    best_feasible_fitness: float
    generations: int
    evaluations: int
    fit_min: float
    fit_max: float
    best_per_generation: list[float]


def ga_optimize(fitness_batch, m: int, cfg: GaConfig, rng: np.random.Generator) -> GaResult:
    """Evolve action sequences of length m toward maximum fitness.

    ``fitness_batch(pop)`` scores a whole (P, m) int8 population, returning
    (fitness, violations) arrays.  Selection is tournament of two,
    crossover single-point, mutation per-gene resampling; the top ``elite``
    genomes carry over unchanged each generation, so the running best never
    degrades.  Terminates after ``generations`` rounds or as soon as one
    generation improves the best fitness by less than eps (relative);
    eps = 0 therefore disables early termination.  A best genome that still
    carries violations has not converged to anything, so the improvement
    test only arms once the incumbent best is violation-free: an
    all-infeasible population keeps searching until the budget ends.
    """
    pop = rng.integers(-1, 2, size=(cfg.population, m), dtype=np.int8)
    fit, viol = fitness_batch(pop)
    evaluations = cfg.population

    def _best_idx(f):
        return int(np.lexsort((np.arange(len(f)), -f))[0])

    bi = _best_idx(fit)
    best_genome = pop[bi].copy()
    best_fit = float(fit[bi])
    best_viol = int(viol[bi])
    feasible_genome = None
    feasible_fit = -np.inf
    fit_min = float(fit.min())
    fit_max = float(fit.max())
    best_per_gen = [best_fit]

    def _note_feasible(p, f, v):
        nonlocal feasible_genome, feasible_fit
        ok = v == 0
        if np.any(ok):
            idx = np.nonzero(ok)[0]
            k = idx[int(np.lexsort((idx, -f[idx]))[0])]
            if f[k] > feasible_fit:
                feasible_fit = float(f[k])
                feasible_genome = p[k].copy()

    _note_feasible(pop, fit, viol)

    gen = 1
    while gen < cfg.generations:
        order = np.lexsort((np.arange(len(fit)), -fit))
        elite_idx = order[: cfg.elite]
        n_child = cfg.population - cfg.elite

        a = rng.integers(0, cfg.population, size=n_child)
        b = rng.integers(0, cfg.population, size=n_child)
        p1 = np.where(fit[a] >= fit[b], a, b)
        a = rng.integers(0, cfg.population, size=n_child)
        b = rng.integers(0, cfg.population, size=n_child)
        p2 = np.where(fit[a] >= fit[b], a, b)

        children = pop[p1].copy()
        if m >= 2:
            do_cross = rng.random(n_child) < cfg.crossover
            points = rng.integers(1, m, size=n_child)
            tail = np.arange(m)[None, :] >= points[:, None]
            swap = do_cross[:, None] & tail
            children = np.where(swap, pop[p2], children).astype(np.int8)
        mutate = rng.random((n_child, m)) < cfg.mutation
        resampled = rng.integers(-1, 2, size=(n_child, m), dtype=np.int8)
        children = np.where(mutate, resampled, children).astype(np.int8)

        child_fit, child_viol = fitness_batch(children)
        evaluations += n_child
        pop = np.concatenate([pop[elite_idx], children])
        fit = np.concatenate([fit[elite_idx], child_fit])
        viol = np.concatenate([viol[elite_idx], child_viol])
        gen += 1

        _note_feasible(children, child_fit, child_viol)
        fit_min = min(fit_min, float(child_fit.min()))
        fit_max = max(fit_max, float(child_fit.max()))
        bi = _best_idx(fit)
        if float(fit[bi]) > best_fit:
            best_fit = float(fit[bi])
            best_genome = pop[bi].copy()
            best_viol = int(viol[bi])
        best_per_gen.append(best_fit)
        improvement = best_per_gen[-1] - best_per_gen[-2]
        if best_viol == 0 and improvement < cfg.eps * max(1.0, abs(best_per_gen[-2])):
            break

    return GaResult(
        best_genome=best_genome,
        best_fitness=best_fit,
        best_violations=best_viol,
        best_feasible_genome=feasible_genome,
        best_feasible_fitness=feasible_fit if feasible_genome is not None else float("nan"),
        generations=gen,
        evaluations=evaluations,
        fit_min=fit_min,
        fit_max=fit_max,
        best_per_generation=best_per_gen,
    )


@dataclass
class PlanProblem:
    """Everything one decision needs, independent of the jump value tried.

    ``pw`` is the probability layer pre-masked by the found latch; ``chi``
    the uncertainty layer; ``denied`` the uint8 blocked-cell mask built
    from the areas this vehicle has perceived.  ``areas`` (plus the grid
    bounds) feed the emergency clearance calculation only.
    """

    spec: GridSpec
    pose: GridPose
    pw: np.ndarray
    chi: np.ndarray
    denied: np.ndarray
    peers: np.ndarray
    rep_k: float
    rep_mu: float
    rep_dmax: float
    zero_dir: tuple[float, float]
    w_prob: float
    w_unc: float
    w_col: float
    fov_cache: FootprintCache | None
    areas: list[DeniedArea] = field(default_factory=list)
    _tables: dict[int, tuple] = field(default_factory=dict)
    _cov: np.ndarray | None = None
    _touched: np.ndarray | None = None

    def tables(self, j: int):
        got = self._tables.get(j)
        if got is None:
            inc_x, inc_y = increment_tables(j)
            if self.fov_cache is not None:
                parts_x, parts_y, ptr = [], [], [0]
                for idx in range(8 * j):
                    n = idx - 4 * j + 1
                    dx, dy = self.fov_cache.offsets(slot_heading(n, j))
                    parts_x.append(dx)
                    parts_y.append(dy)
                    ptr.append(ptr[-1] + len(dx))
                offs_x = np.concatenate(parts_x).astype(np.int64)
                offs_y = np.concatenate(parts_y).astype(np.int64)
                offs_ptr = np.asarray(ptr, dtype=np.int64)
            else:
                offs_x = np.zeros(0, dtype=np.int64)
                offs_y = np.zeros(0, dtype=np.int64)
                offs_ptr = np.zeros(8 * j + 1, dtype=np.int64)
            got = (inc_x, inc_y, offs_x, offs_y, offs_ptr)
            self._tables[j] = got
        return got

    def scratch(self, m: int):
        if self._cov is None:
            self._cov = np.zeros(self.spec.cells_x * self.spec.cells_y, dtype=np.int32)
        cap = m * (self.fov_cache.max_cells if self.fov_cache else 1) + 64
        if self._touched is None or len(self._touched) < cap:
            self._touched = np.zeros(cap, dtype=np.int64)
        return self._cov, self._touched

    def fitness_batch(self, j: int, m: int):
        inc_x, inc_y, offs_x, offs_y, offs_ptr = self.tables(j)
        start_n = heading_to_number(self.pose.heading, j)
        pow_half = 0.5 ** np.arange(m + 1, dtype=np.float64)
        cov, touched = self.scratch(m)
        denied_u8 = self.denied

        def batch(pop):
            return kernels.evaluate_sequences(
                np.ascontiguousarray(pop, dtype=np.int8),
                self.pose.x_g,
                self.pose.y_g,
                start_n,
                j,
                inc_x,
                inc_y,
                offs_x,
                offs_y,
                offs_ptr,
                self.pw,
                self.chi,
                denied_u8,
                self.peers,
                self.rep_k,
                self.rep_mu,
                self.rep_dmax,
                self.zero_dir[0],
                self.zero_dir[1],
                self.spec.r,
                self.w_prob,
                self.w_unc,
                self.w_col,
                pow_half,
                cov,
                touched,
            )

        return batch


@dataclass
class Decision:
    """One executed planning call: the chosen action plus diagnostics."""

    action: int
    j_used: int
    horizon: int
    emergency: bool
    generations: int
    evaluations: int
    best_fitness: float
    fit_min: float
    fit_max: float
    wall_time: float
    genome: np.ndarray | None = None


def _threat_clearance(x: float, y: float, spec: GridSpec, areas: list[DeniedArea]) -> float:
    """Distance to the nearest threat edge: denied areas and the four walls.
    Negative when already inside a threat."""
    d = min(x, spec.width - x, y, spec.height - y)
    for area in areas:
        d = min(d, area.boundary_distance(x, y))
    return d


def emergency_action(pose: GridPose, spec: GridSpec, areas: list[DeniedArea]) -> int:
    """Last resort at j = 1: pick the action whose successor keeps the most
    clearance from the nearest threat (straight wins ties)."""
    from .geometry import step

    best_u, best_d = 0, -np.inf
    for u in (0, -1, 1):
        nxt = step(pose, u, 1)
        x = spec.r * (nxt.x_g - 0.5)
        y = spec.r * (nxt.y_g - 0.5)
        d = _threat_clearance(x, y, spec, areas)
        if d > best_d:
            best_u, best_d = u, d
    return best_u


def _ladder(problem: PlanProblem, j_start: int, m: int, cfg: GaConfig, rng, fitness_for):
    """Shared fallback ladder: try j_start down to 1, accept the first jump
    value admitting a positive-fitness feasible sequence; at j = 1 accept
    any feasible sequence; otherwise go emergency."""
    t0 = time.perf_counter()
    total_gens = 0
    total_evals = 0
    fit_min = np.inf
    fit_max = -np.inf
    for j_try in range(j_start, 0, -1):
        res = ga_optimize(fitness_for(j_try), m, cfg, rng)
        total_gens += res.generations
        total_evals += res.evaluations
        fit_min = min(fit_min, res.fit_min)
        fit_max = max(fit_max, res.fit_max)
        accept = res.best_feasible_genome is not None and (
            res.best_feasible_fitness > 0.0 or j_try == 1
        )
        if accept:
            return Decision(
                action=int(res.best_feasible_genome[0]),
                j_used=j_try,
                horizon=m,
                emergency=False,
                generations=total_gens,
                evaluations=total_evals,
                best_fitness=res.best_feasible_fitness,
                fit_min=fit_min,
                fit_max=fit_max,
                wall_time=time.perf_counter() - t0,
                genome=res.best_feasible_genome,
            )
    u = emergency_action(problem.pose, problem.spec, problem.areas)
    return Decision(
        action=u,
        j_used=1,
        horizon=m,
        emergency=True,
        generations=total_gens,
        evaluations=total_evals,
        best_fitness=float("nan"),
        fit_min=fit_min if np.isfinite(fit_min) else float("nan"),
        fit_max=fit_max if np.isfinite(fit_max) else float("nan"),
        wall_time=time.perf_counter() - t0,
    )


def decide(problem: PlanProblem, j_start: int, m: int, cfg: GaConfig, rng: np.random.Generator) -> Decision:
    """Search-revenue planning with the maneuverability fallback ladder."""
    return _ladder(problem, j_start, m, cfg, rng, lambda j: problem.fitness_batch(j, m))


def relay_plan(
    problem: PlanProblem,
    j_start: int,
    m: int,
    cfg: GaConfig,
    rng: np.random.Generator,
    centroid: tuple[float, float],
) -> Decision:
    """Keep-station planning for the relay vehicle.

    The relay computes no search revenue; any violation-free sequence is
    acceptable, with a small bonus for ending near the given point (the
    centroid of the vehicles it serves) so it loiters over the cluster.
    """

    def fitness_for(j: int):
        inc_x, inc_y, *_ = problem.tables(j)
        start_n = heading_to_number(problem.pose.heading, j)

        def batch(pop):
            cells, _, _, violations = kernels.rollout_cells(
                np.ascontiguousarray(pop, dtype=np.int8),
                problem.pose.x_g,
                problem.pose.y_g,
                start_n,
                j,
                inc_x,
                inc_y,
                problem.spec.cells_x,
                problem.spec.cells_y,
                problem.denied,
            )
            fx = problem.spec.r * (cells[:, -1, 0] - 0.5) - centroid[0]
            fy = problem.spec.r * (cells[:, -1, 1] - 0.5) - centroid[1]
            fitness = 1.0 / (1.0 + np.sqrt(fx * fx + fy * fy))
            bad = violations > 0
            fitness[bad] = -(1.0 + violations[bad])
            return fitness, violations

        return batch

    return _ladder(problem, j_start, m, cfg, rng, fitness_for)
