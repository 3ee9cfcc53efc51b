"""Closed-loop simulation: expert -> plan -> move -> sense -> exchange.

One epoch per decision interval, vehicles processed in ascending id order,
then a synchronous communication barrier (packages are snapshotted before
any merge, so nobody sees intra-epoch mutations), scripted events, and a
metrics frame.  Everything is driven by a single seed: per-vehicle RNG
streams are derived from (seed, id), so a (scenario, strategy, seed)
triple reproduces byte-identical metric and trajectory logs.

Three strategy presets reuse one code path: 1 = rotors only with unlimited
radio range, 2 = rotors only with nominal ranges, 3 = the full roster
(long-range relay included) with nominal ranges.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import comms, kernels
from .errors import ValidationError
from .expert import ExpertInputs, closest_target_distance, eval_expert
from .geometry import GridPose, feasible_j_values, step
from .mapping import (
    FootprintCache,
    Target,
    advance_denied_areas,
    apply_detection_events,
    apply_detection_footprint,
    denied_mask,
    init_probability,
    rasterize_fov,
    world_to_grid,
)
from .objective import Weights
from .planner import PlanProblem, decide, relay_plan
from .scenario import Scenario, UavSpec

__all__ = ["run", "compare_strategies", "ga_bench", "SimResult"]

UNLIMITED_RANGE = 1e12


@dataclass
class SimResult:
    """Everything a run produced, plus writers for the on-disk artifacts."""

    scenario_name: str
    strategy: int
    seed: int
    uav_ids: list[int]
    frames: dict[str, np.ndarray]
    trajectory: list[tuple]
    links_log: list[tuple]
    ga_log: list[tuple]
    expert_log: list[tuple]
    event_log: list[str]
    summary: dict

    def metrics_text(self) -> str:
        ids = self.uav_ids
        cols = ["t", "targets_found", "links", "global_chi", "global_p"]
        for i in ids:
            cols += [f"alive_{i}", f"chi_{i}", f"p_{i}", f"traj_{i}",
                     f"own_dchi_{i}", f"replay_dchi_{i}", f"new_records_{i}"]
        lines = [",".join(cols)]
        n = len(self.frames["t"])
        for k in range(n):
            row = [_fmt(self.frames[c][k]) for c in cols]
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"

    def trajectory_text(self) -> str:
        lines = ["uav,t,x,y,heading,j,u,emergency"]
        for row in self.trajectory:
            lines.append(",".join(_fmt(v) for v in row))
        return "\n".join(lines) + "\n"

    def write(self, out_dir: str | Path) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "metrics.csv").write_text(self.metrics_text())
        (out / "trajectory.csv").write_text(self.trajectory_text())
        links = ["t,a,b"] + [",".join(_fmt(v) for v in row) for row in self.links_log]
        (out / "links.csv").write_text("\n".join(links) + "\n")
        ga = ["t,uav,j,horizon,generations,evaluations,best,fit_min,fit_max,wall_s"]
        ga += [",".join(_fmt(v) for v in row) for row in self.ga_log]
        (out / "ga_log.csv").write_text("\n".join(ga) + "\n")
        ex = ["t,uav,e1,e2,j,k_prob,k_unc,k_col,horizon"]
        ex += [",".join(_fmt(v) for v in row) for row in self.expert_log]
        (out / "expert_log.csv").write_text("\n".join(ex) + "\n")
        (out / "events.log").write_text("\n".join(self.event_log) + ("\n" if self.event_log else ""))
        (out / "summary.json").write_text(json.dumps(self.summary, indent=2, sort_keys=True) + "\n")
        return out


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    f = float(v)
    if math.isnan(f):
        return "nan"
    return repr(f)


class _Vehicle:
    """Per-run mutable state of one vehicle."""

    def __init__(self, spec: UavSpec, slot: int, scenario: Scenario, rng: np.random.Generator):
        self.spec = spec
        self.slot = slot
        self.rng = rng
        self.alive = True
        self.pose = GridPose(spec.spawn_cell[0], spec.spawn_cell[1], spec.spawn_heading)
        self.com_distance = spec.com_distance
        self.feasible_j = feasible_j_values(
            spec.v_min, spec.v_max, spec.a_max, scenario.grid.r, scenario.dt
        )
        self.fov_cache = (
            FootprintCache(spec.fov, scenario.grid.r) if spec.fov is not None else None
        )
        self.smap = init_probability(
            scenario.grid, [(tuple(t["prior"]), t["peak"], t["width"]) for t in scenario.targets],
            owner=spec.id,
        )
        self.traj_len = 0.0
        self.known_areas: set[int] = set()
        self._mask = None
        self._mask_stamp = (-1, -1)
        self.cov = np.zeros(scenario.grid.cells_x * scenario.grid.cells_y, dtype=np.int32)
        self.touched = np.zeros(0, dtype=np.int64)
        self.tables_by_j: dict[int, tuple] = {}
        self.emergencies = 0
        self.violations = 0
        self.violations_emergency = 0

    def world_pos(self, grid) -> tuple[float, float]:
        # cell-center formula, valid even for an (emergency) out-of-bounds pose
        return grid.r * (self.pose.x_g - 0.5), grid.r * (self.pose.y_g - 0.5)

    def denied_mask_for(self, areas, grid, area_version: int) -> np.ndarray:
        stamp = (len(self.known_areas), area_version)
        if self._mask is None or self._mask_stamp != stamp:
            known = [areas[i] for i in sorted(self.known_areas)]
            self._mask = denied_mask(known, grid).astype(np.uint8)
            self._mask_stamp = stamp
        return self._mask


def _strategy_roster(scenario: Scenario, strategy: int) -> list[UavSpec]:
    if strategy in (1, 2):
        return sorted((u for u in scenario.uavs if u.kind == "rotor"), key=lambda u: u.id)
    return sorted(scenario.uavs, key=lambda u: u.id)


def run(
    scenario: Scenario,
    seed: int,
    strategy: int | None = None,
    out_dir: str | Path | None = None,
    snapshot_every: int = 0,
    duration: float | None = None,
    fixed_params: tuple[int, int] | None = None,
) -> SimResult:
    """Execute one simulation and return its full log set.

    ``fixed_params=(j, horizon)`` bypasses the expert system (all weight
    corrections 1), used by the GA timing sweep.  ``snapshot_every`` > 0
    writes the global map layers as delimited text every that many epochs
    (requires ``out_dir``).
    """
    problems = scenario.validate()
    if problems:
        raise ValidationError(problems)
    strategy = scenario.strategy if strategy is None else strategy
    if strategy not in (1, 2, 3):
        raise ValidationError([f"strategy must be 1, 2 or 3, got {strategy}"])
    duration = scenario.duration if duration is None else duration
    kernels.warmup()
    wall_start = time.perf_counter()

    roster = _strategy_roster(scenario, strategy)
    grid = scenario.grid
    targets: list[Target] = scenario.build_targets()
    targets.sort(key=lambda t: t.id)
    target_slot = {t.id: i for i, t in enumerate(targets)}
    engine_rng = np.random.default_rng(np.random.SeedSequence((seed, 0)))
    areas = scenario.build_denied(engine_rng)
    area_version = 0
    events = sorted(scenario.events, key=lambda e: e.t)
    fired = [False] * len(events)

    vehicles: list[_Vehicle] = []
    for slot, spec in enumerate(roster):
        rng = np.random.default_rng(np.random.SeedSequence((seed, spec.id)))
        vehicles.append(_Vehicle(spec, slot, scenario, rng))
    by_id = {v.spec.id: v for v in vehicles}
    n_uavs = len(vehicles)
    n_targets = len(targets)
    for v in vehicles:
        v.store = comms.ShareStore(n_uavs=n_uavs, history=scenario.history_length, n_targets=n_targets)

    global_map = init_probability(
        grid, [(tuple(t["prior"]), t["peak"], t["width"]) for t in scenario.targets], owner=0
    )

    def target_cells() -> dict[tuple[int, int], list[Target]]:
        out: dict[tuple[int, int], list[Target]] = {}
        for tgt in targets:
            cell = world_to_grid(tgt.position[0], tgt.position[1], grid)
            out.setdefault(cell, []).append(tgt)
        return out

    tcells = target_cells()

    ids = [v.spec.id for v in vehicles]
    frames: dict[str, list] = {c: [] for c in ["t", "targets_found", "links", "global_chi", "global_p"]}
    for i in ids:
        for c in ("alive", "chi", "p", "traj", "own_dchi", "replay_dchi", "new_records"):
            frames[f"{c}_{i}"] = []
    trajectory: list[tuple] = []
    links_log: list[tuple] = []
    ga_log: list[tuple] = []
    expert_log: list[tuple] = []
    event_log: list[str] = []
    ga_walls: list[float] = []
    contact_epochs = 0

    snap_dir = None
    if snapshot_every and out_dir is not None:
        snap_dir = Path(out_dir) / "snapshots"
        snap_dir.mkdir(parents=True, exist_ok=True)

    n_epochs = int(round(duration / scenario.dt))
    for epoch in range(1, n_epochs + 1):
        t = epoch * scenario.dt
        own_dchi = {v.spec.id: 0.0 for v in vehicles}

        for v in vehicles:
            if not v.alive:
                continue
            x, y = v.world_pos(grid)

            # perceive denied areas within this vehicle's perception range
            for ai, area in enumerate(areas):
                if ai not in v.known_areas and area.boundary_distance(x, y) <= v.spec.perc_distance:
                    v.known_areas.add(ai)

            # expert selection (or the fixed sweep parameters)
            if fixed_params is None:
                refs = []
                for tid, slot in target_slot.items():
                    rec = v.store.targets[slot]
                    if rec[2] > comms.EMPTY_T:
                        refs.append((float(rec[0]), float(rec[1])))
                    else:
                        tspec = targets[slot]
                        refs.append(tspec.prior)
                inputs = ExpertInputs(
                    target_distance=closest_target_distance((x, y), refs),
                    warning_distance=scenario.warning_distance,
                    n_found=int(np.count_nonzero(v.store.targets[:, 2] > comms.EMPTY_T)),
                    n_total=n_targets,
                )
                out = eval_expert(inputs, v.spec.expert, v.feasible_j)
                j0, horizon = out.j, out.horizon
                w = Weights(
                    w_prob=scenario.weights.w_prob,
                    w_unc=scenario.weights.w_unc,
                    w_col=scenario.weights.w_col,
                    k_prob=out.k_prob,
                    k_unc=out.k_unc,
                    k_col=out.k_col,
                )
                e1 = inputs.target_distance / inputs.warning_distance
                e2 = 1.0 if n_targets == 0 else inputs.n_found / n_targets
                expert_log.append(
                    (t, v.spec.id, e1, e2, out.j, out.k_prob, out.k_unc, out.k_col, out.horizon)
                )
            else:
                j0, horizon = fixed_params
                j0 = min(max(j0, v.feasible_j[0]), v.feasible_j[-1])
                w = Weights(
                    w_prob=scenario.weights.w_prob,
                    w_unc=scenario.weights.w_unc,
                    w_col=scenario.weights.w_col,
                )

            # peers: other alive rotors at their last position known to us
            peer_list = []
            for other in vehicles:
                if other is v or not other.alive or other.spec.kind != "rotor":
                    continue
                recs = v.store.records(other.slot)
                if len(recs):
                    peer_list.append((float(recs[-1, 0]), float(recs[-1, 1])))
            peers = np.asarray(peer_list, dtype=np.float64).reshape(-1, 2)

            theta = v.rng.uniform(0.0, 2.0 * math.pi)
            zero_dir = (math.cos(theta), math.sin(theta))
            wp, we, wc = w.effective()
            problem = PlanProblem(
                spec=grid,
                pose=v.pose,
                pw=np.where(v.smap.found, 0.0, v.smap.probability),
                chi=v.smap.uncertainty,
                denied=v.denied_mask_for(areas, grid, area_version),
                peers=peers,
                rep_k=scenario.repulsion.k,
                rep_mu=scenario.repulsion.mu,
                rep_dmax=scenario.repulsion.d_max,
                zero_dir=zero_dir,
                w_prob=wp,
                w_unc=we,
                w_col=wc,
                fov_cache=v.fov_cache,
                areas=[areas[i] for i in sorted(v.known_areas)],
            )
            problem._tables = v.tables_by_j
            problem._cov = v.cov
            if len(v.touched):
                problem._touched = v.touched

            if v.spec.kind == "fixed_wing":
                known_rotors = []
                for other in vehicles:
                    if other.spec.kind != "rotor" or not other.alive:
                        continue
                    recs = v.store.records(other.slot)
                    if len(recs):
                        known_rotors.append((float(recs[-1, 0]), float(recs[-1, 1])))
                if known_rotors:
                    arr = np.asarray(known_rotors)
                    centroid = (float(arr[:, 0].mean()), float(arr[:, 1].mean()))
                else:
                    centroid = (grid.width / 2.0, grid.height / 2.0)
                decision = relay_plan(problem, j0, horizon, v.spec.ga, v.rng, centroid)
            else:
                decision = decide(problem, j0, horizon, v.spec.ga, v.rng)
            v.touched = problem._touched if problem._touched is not None else v.touched

            if decision.emergency:
                v.emergencies += 1
                event_log.append(f"t={_fmt(t)} uav={v.spec.id} EMERGENCY action={decision.action}")

            # execute the first action
            prev = v.pose
            v.pose = step(v.pose, decision.action, decision.j_used)
            dx = v.pose.x_g - prev.x_g
            dy = v.pose.y_g - prev.y_g
            v.traj_len += grid.r * math.hypot(dx, dy)

            in_bounds = grid.in_bounds_cell(v.pose.x_g, v.pose.y_g)
            violated = None
            if in_bounds:
                nx, ny = v.world_pos(grid)
                if any(area.contains(nx, ny) for area in areas):
                    violated = "denied-area"
            else:
                violated = "out-of-bounds"
            if violated:
                if decision.emergency:
                    v.violations_emergency += 1
                else:
                    v.violations += 1
                event_log.append(f"t={_fmt(t)} uav={v.spec.id} VIOLATION {violated}"
                                 f" emergency={int(decision.emergency)}")

            # record own pose (wire precision) and sense from exactly that pose
            wx, wy = v.world_pos(grid)
            qx = float(np.float32(wx))
            qy = float(np.float32(wy))
            qh = float(np.float32(v.pose.heading))
            v.store.record(v.slot, qx, qy, qh, t)
            comms.mark_replayed(v.store, v.slot, t)

            if v.fov_cache is not None and in_bounds:
                cells = rasterize_fov(qx, qy, qh, grid, v.fov_cache)
                result = apply_detection_footprint(
                    v.smap, cells, tcells, scenario.p_detect, scenario.p_false,
                    scenario.found_threshold, v.rng, t,
                )
                own_dchi[v.spec.id] = result.uncertainty_drop
                apply_detection_events(
                    global_map, cells, result.detections, scenario.p_detect,
                    scenario.p_false, scenario.found_threshold,
                )
                for tgt in result.discovered:
                    v.store.set_target(target_slot[tgt.id], tgt.position[0], tgt.position[1], t)
                    event_log.append(f"t={_fmt(t)} uav={v.spec.id} DISCOVERED target={tgt.id}")

            trajectory.append(
                (v.spec.id, t, wx, wy, v.pose.heading,
                 decision.j_used, decision.action, int(decision.emergency))
            )
            ga_log.append(
                (t, v.spec.id, decision.j_used, decision.horizon, decision.generations,
                 decision.evaluations, decision.best_fitness, decision.fit_min,
                 decision.fit_max, decision.wall_time)
            )
            ga_walls.append(decision.wall_time)

        # communication barrier: snapshot, link, merge, replay
        alive = [v for v in vehicles if v.alive]
        replay_dchi = {v.spec.id: 0.0 for v in vehicles}
        new_records = {v.spec.id: 0 for v in vehicles}
        pairs = []
        if len(alive) >= 2:
            positions = np.array(
                [[*v.world_pos(grid), v.spec.altitude] for v in alive], dtype=np.float64
            )
            ranges = np.array(
                [UNLIMITED_RANGE if strategy == 1 else v.com_distance for v in alive]
            )
            pairs = comms.link_pairs(positions, ranges)
            packages = {}
            for a, b in pairs:
                for idx in (a, b):
                    if idx not in packages:
                        packages[idx] = comms.encode_store(alive[idx].store, alive[idx].spec.id)
            for a, b in pairs:
                links_log.append((t, alive[a].spec.id, alive[b].spec.id))
            incoming: dict[int, list[int]] = {}
            for a, b in pairs:
                incoming.setdefault(b, []).append(a)
                incoming.setdefault(a, []).append(b)
            fov_caches_by_slot = {v.slot: v.fov_cache for v in vehicles if v.fov_cache is not None}
            for ridx in sorted(incoming):
                receiver = alive[ridx]
                collected: dict[tuple[int, float], np.ndarray] = {}
                for sidx in sorted(incoming[ridx]):
                    pkg = comms.decode_package(packages[sidx])
                    for slot, recs in comms.merge(receiver.store, pkg):
                        for rec in recs:
                            collected[(slot, float(rec[3]))] = rec
                if collected:
                    by_slot: dict[int, list[np.ndarray]] = {}
                    for (slot, _), rec in sorted(collected.items()):
                        by_slot.setdefault(slot, []).append(rec)
                    replay = [(slot, np.array(rs)) for slot, rs in sorted(by_slot.items())]
                    dchi, n_replayed = comms.replay_detections(
                        receiver.smap, replay, fov_caches_by_slot, receiver.store.targets,
                        scenario.p_detect, scenario.p_false, scenario.found_threshold,
                    )
                    replay_dchi[receiver.spec.id] = dchi
                    new_records[receiver.spec.id] = n_replayed
        if any(n > 0 for n in new_records.values()):
            contact_epochs += 1

        # scripted events fire at the first epoch boundary reaching their time
        for i, e in enumerate(events):
            if not fired[i] and e.t <= t:
                fired[i] = True
                _apply_event(e, by_id, targets, target_slot, event_log, t)
                if e.kind == "target_move":
                    tcells = target_cells()

        advance_denied_areas(areas, scenario.dt, grid)
        if any(np.any(a.velocity) for a in areas):
            area_version += 1

        frames["t"].append(t)
        frames["targets_found"].append(sum(1 for tgt in targets if tgt.discovered))
        frames["links"].append(len(pairs))
        frames["global_chi"].append(float(global_map.uncertainty.sum()))
        frames["global_p"].append(float(global_map.probability.sum()))
        for v in vehicles:
            i = v.spec.id
            frames[f"alive_{i}"].append(1 if v.alive else 0)
            frames[f"chi_{i}"].append(float(v.smap.uncertainty.sum()) if v.alive else 0.0)
            frames[f"p_{i}"].append(float(v.smap.probability.sum()) if v.alive else 0.0)
            frames[f"traj_{i}"].append(v.traj_len)
            frames[f"own_dchi_{i}"].append(own_dchi[i])
            frames[f"replay_dchi_{i}"].append(replay_dchi[i])
            frames[f"new_records_{i}"].append(new_records[i])

        if snap_dir is not None and epoch % snapshot_every == 0:
            np.savetxt(snap_dir / f"t{epoch:05d}_probability.txt", global_map.probability, delimiter="\t")
            np.savetxt(snap_dir / f"t{epoch:05d}_uncertainty.txt", global_map.uncertainty, delimiter="\t")

        if scenario.stop_when_all_found and all(tgt.discovered for tgt in targets):
            break

    summary = {
        "scenario": scenario.name,
        "strategy": strategy,
        "seed": seed,
        "backend": kernels.backend_name(),
        "epochs": len(frames["t"]),
        "targets_found": int(frames["targets_found"][-1]),
        "discovery_times": {str(tgt.id): tgt.discovered_at for tgt in targets if tgt.discovered},
        "final_global_chi": frames["global_chi"][-1],
        "final_global_p": frames["global_p"][-1],
        "trajectory_lengths": {str(v.spec.id): v.traj_len for v in vehicles},
        "emergencies": sum(v.emergencies for v in vehicles),
        "violations": sum(v.violations for v in vehicles),
        "violations_emergency": sum(v.violations_emergency for v in vehicles),
        "contact_epochs": contact_epochs,
        "mean_ga_wall_s": float(np.mean(ga_walls)) if ga_walls else 0.0,
        "max_ga_wall_s": float(np.max(ga_walls)) if ga_walls else 0.0,
        "dropped_records": sum(v.store.dropped_records for v in vehicles),
        "wall_time_s": time.perf_counter() - wall_start,
    }
    result = SimResult(
        scenario_name=scenario.name,
        strategy=strategy,
        seed=seed,
        uav_ids=ids,
        frames={k: np.asarray(v) for k, v in frames.items()},
        trajectory=trajectory,
        links_log=links_log,
        ga_log=ga_log,
        expert_log=expert_log,
        event_log=event_log,
        summary=summary,
    )
    if out_dir is not None:
        result.write(out_dir)
    return result


def _apply_event(e, by_id, targets, target_slot, event_log, t):
    if e.kind == "dropout":
        v = by_id[e.params["uav"]]
        if v.alive:
            v.alive = False
            event_log.append(f"t={_fmt(t)} uav={v.spec.id} DROPOUT")
    elif e.kind == "range_change":
        v = by_id[e.params["uav"]]
        v.com_distance = float(e.params["com_distance"])
        event_log.append(f"t={_fmt(t)} uav={v.spec.id} RANGE_CHANGE {v.com_distance}")
    elif e.kind == "target_move":
        tgt = targets[target_slot[e.params["target"]]]
        tgt.position = (float(e.params["to"][0]), float(e.params["to"][1]))
        event_log.append(f"t={_fmt(t)} target={tgt.id} MOVED to {tgt.position}")
    else:
        raise ValidationError([f"unknown event kind {e.kind!r}"])


def _compare_job(args):
    scenario, strategy, seed, duration = args
    res = run(scenario, seed=seed, strategy=strategy, duration=duration)
    rotor_ids = [u.id for u in scenario.uavs if u.kind == "rotor" and u.id in res.uav_ids]
    alive = np.stack([res.frames[f"alive_{i}"] for i in rotor_ids])
    n_alive = np.maximum(alive.sum(axis=0), 1)
    fleet_chi = np.stack([res.frames[f"chi_{i}"] for i in rotor_ids]).sum(axis=0) / n_alive
    fleet_p = np.stack([res.frames[f"p_{i}"] for i in rotor_ids]).sum(axis=0) / n_alive
    return (
        strategy,
        seed,
        res.frames["global_chi"],
        res.frames["global_p"],
        fleet_chi,
        fleet_p,
        res.summary["contact_epochs"],
        res.summary["targets_found"],
    )


def compare_strategies(
    scenario: Scenario,
    strategies: list[int],
    seeds: list[int],
    duration: float | None = None,
    workers: int = 1,
) -> dict:
    """Run each (strategy, seed) pair and aggregate mean state curves.

    Two views per metric: ``*_chi``/``*_p`` from the ground-truth fused
    map, and ``fleet_*`` from the cluster's own belief (mean over alive
    rotor vehicles' private maps), which is what information sharing
    actually improves.  Jobs are independent; with workers > 1 they run in
    parallel processes and are re-assembled in deterministic order.
    """
    jobs = [(scenario, st, sd, duration) for st in strategies for sd in seeds]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_compare_job, jobs))
    else:
        results = [_compare_job(j) for j in jobs]

    report: dict = {}
    for st in strategies:
        rows = [r for r in results if r[0] == st]
        rows.sort(key=lambda r: r[1])
        chi = np.stack([r[2] for r in rows])
        p = np.stack([r[3] for r in rows])
        fleet_chi = np.stack([r[4] for r in rows])
        fleet_p = np.stack([r[5] for r in rows])
        report[st] = {
            "seeds": [r[1] for r in rows],
            "mean_chi": chi.mean(axis=0),
            "mean_p": p.mean(axis=0),
            "mean_fleet_chi": fleet_chi.mean(axis=0),
            "mean_fleet_p": fleet_p.mean(axis=0),
            "final_chi": [float(c[-1]) for c in chi],
            "final_p": [float(q[-1]) for q in p],
            "final_fleet_chi": [float(c[-1]) for c in fleet_chi],
            "final_fleet_p": [float(q[-1]) for q in fleet_p],
            "contact_epochs": [r[6] for r in rows],
            "targets_found": [r[7] for r in rows],
        }
    return report


def ga_bench(
    scenario: Scenario,
    m_values: list[int],
    j_values: list[int],
    duration: float = 120.0,
    seed: int | list[int] = 1,
) -> list[dict]:
    """Sweep (horizon, jump value) with the expert system disabled and time
    the planner; one row per cell with mean/max wall seconds per decision,
    pooled over the given seed(s)."""
    kernels.warmup()
    seeds = [seed] if isinstance(seed, int) else list(seed)
    rows = []
    for m in m_values:
        for j in j_values:
            walls = []
            gens = []
            for sd in seeds:
                res = run(scenario, seed=sd, strategy=1, duration=duration, fixed_params=(j, m))
                walls += [r[9] for r in res.ga_log]
                gens += [r[4] for r in res.ga_log]
            rows.append(
                {
                    "horizon": m,
                    "j": j,
                    "decisions": len(walls),
                    "mean_s": float(np.mean(walls)),
                    "max_s": float(np.max(walls)),
                    "mean_generations": float(np.mean(gens)),
                }
            )
    return rows
