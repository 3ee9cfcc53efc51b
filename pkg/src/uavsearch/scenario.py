"""Declarative experiment descriptions.

A scenario is a single JSON document with sections for the task area,
vehicle roster, targets (true and prior positions), denied areas, scripted
events, and parameter overrides (expert tables, GA knobs, sensing and
repulsion constants).  The grammar is documented in
docs/scenario_format.md; everything carries engineering defaults so small
files stay small.  Loading is strict: ``validate`` returns a list of
field-addressed problems and the engine refuses to run a scenario that has
any.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .expert import ExpertTable, default_fixed_wing_table, default_rotor_table
from .geometry import feasible_j_values, grid_supports_acceleration
from .mapping import DeniedArea, FovGeometry, GridSpec, Target
from .objective import RepulsionParams, Weights
from .planner import GaConfig

__all__ = [
    "UavSpec",
    "Event",
    "Scenario",
    "load_scenario",
    "scenario_from_dict",
    "KIND_DEFAULTS",
]

KIND_DEFAULTS = {
    "rotor": {
        "altitude": 40.0,
        "v_min": 0.0,
        "v_max": 35.0,
        "a_max": 10.0,
        "com_distance": 160.0,
        "perc_distance": 300.0,
        "fov": {"along": 40.0, "across": 40.0, "lead": 0.0},
        "ga": {"population": 100, "generations": 50, "mutation": 0.5, "crossover": 0.5,
               "eps": 1e-3, "elite": 1},
    },
    "fixed_wing": {
        "altitude": 200.0,
        "v_min": 20.0,
        "v_max": 70.0,
        "a_max": 10.0,
        "com_distance": 300.0,
        "perc_distance": 600.0,
        "fov": None,
        "ga": {"population": 300, "generations": 50, "mutation": 0.9, "crossover": 0.9,
               "eps": 1e-3, "elite": 1},
    },
}

EVENT_KINDS = ("dropout", "range_change", "target_move")


@dataclass
class UavSpec:
    id: int
    kind: str
    spawn_cell: tuple[int, int]
    spawn_heading: float = 0.0
    altitude: float = 40.0
    v_min: float = 0.0
    v_max: float = 35.0
    a_max: float = 10.0
    com_distance: float = 160.0
    perc_distance: float = 300.0
    fov: FovGeometry | None = None
    ga: GaConfig = field(default_factory=GaConfig)
    expert: ExpertTable = field(default_factory=default_rotor_table)

    @property
    def senses(self) -> bool:
        return self.fov is not None


@dataclass(frozen=True)
class Event:
    kind: str
    t: float
    params: dict


@dataclass
class Scenario:
    name: str
    grid: GridSpec
    uavs: list[UavSpec]
    targets: list[dict]
    denied: list[dict]
    events: list[Event] = field(default_factory=list)
    dt: float = 1.0
    duration: float = 300.0
    strategy: int = 1
    p_detect: float = 0.8
    p_false: float = 1e-4
    found_threshold: float = 0.95
    repulsion: RepulsionParams = field(default_factory=RepulsionParams)
    warning_distance: float = 160.0
    history_length: int = 100
    weights: Weights = field(default_factory=Weights)
    stop_when_all_found: bool = False

    def build_targets(self) -> list[Target]:
        """Fresh mutable target objects for one run."""
        return [
            Target(
                id=t["id"],
                position=tuple(t["position"]),
                prior=tuple(t["prior"]),
                peak=t.get("peak", 0.3),
                width=t.get("width", 50.0),
            )
            for t in self.targets
        ]

    def build_denied(self, rng: np.random.Generator | None = None) -> list[DeniedArea]:
        """Fresh denied-area objects (they may move during a run).

        An entry giving ``speed`` instead of ``velocity`` moves at that
        speed in a direction drawn from ``rng`` (+x when no rng is given).
        """
        out = []
        for d in self.denied:
            velocity = np.asarray(d.get("velocity", (0.0, 0.0)), dtype=float)
            speed = float(d.get("speed", 0.0))
            if speed and not np.any(velocity):
                theta = rng.uniform(0.0, 2.0 * math.pi) if rng is not None else 0.0
                velocity = speed * np.array([math.cos(theta), math.sin(theta)])
            out.append(
                DeniedArea(
                    center=np.array(d["center"], dtype=float),
                    radius=float(d.get("radius", 0.0)),
                    vertices=None if d.get("vertices") is None else np.array(d["vertices"], dtype=float),
                    velocity=velocity,
                )
            )
        return out

    def validate(self) -> list[str]:
        return _validate(self)


def _expert_table_from(rows: dict) -> ExpertTable:
    s1 = [
        (float(r[0]), math.inf if r[1] is None else float(r[1]), int(r[2]), float(r[3]))
        for r in rows["system1"]
    ]
    s2 = [
        (float(r[0]), math.inf if r[1] is None else float(r[1]), float(r[2]), float(r[3]), int(r[4]))
        for r in rows["system2"]
    ]
    return ExpertTable(system1=s1, system2=s2)


def _build_uav(entry: dict, overrides: dict, problems: list[str]) -> UavSpec | None:
    path = f"uavs[id={entry.get('id', '?')}]"
    kind = entry.get("kind", "rotor")
    if kind not in KIND_DEFAULTS:
        problems.append(f"{path}.kind: unknown kind {kind!r}")
        return None
    merged = dict(KIND_DEFAULTS[kind])
    merged.update(overrides.get("uav_defaults", {}).get(kind, {}))
    merged.update({k: v for k, v in entry.items() if k not in ("id", "kind", "spawn_cell", "spawn_heading")})

    fov_cfg = merged.get("fov")
    fov = None if fov_cfg is None else FovGeometry(
        along=float(fov_cfg["along"]), across=float(fov_cfg["across"]), lead=float(fov_cfg.get("lead", 0.0))
    )
    ga_cfg = dict(KIND_DEFAULTS[kind]["ga"])
    ga_cfg.update(overrides.get("ga", {}).get(kind, {}))
    ga_cfg.update(entry.get("ga") or {})
    try:
        ga = GaConfig(**ga_cfg)
    except (TypeError, ValueError) as exc:
        problems.append(f"{path}.ga: {exc}")
        ga = GaConfig()

    table_rows = overrides.get("expert_tables", {}).get(kind)
    if table_rows is None:
        table = default_rotor_table() if kind == "rotor" else default_fixed_wing_table()
    else:
        try:
            table = _expert_table_from(table_rows)
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            problems.append(f"overrides.expert_tables.{kind}: malformed rows ({exc})")
            table = default_rotor_table()

    try:
        spawn = entry["spawn_cell"]
        spawn_cell = (int(spawn[0]), int(spawn[1]))
    except (KeyError, TypeError, IndexError):
        problems.append(f"{path}.spawn_cell: missing or malformed")
        return None

    return UavSpec(
        id=int(entry["id"]),
        kind=kind,
        spawn_cell=spawn_cell,
        spawn_heading=float(entry.get("spawn_heading", 0.0)),
        altitude=float(merged["altitude"]),
        v_min=float(merged["v_min"]),
        v_max=float(merged["v_max"]),
        a_max=float(merged["a_max"]),
        com_distance=float(merged["com_distance"]),
        perc_distance=float(merged["perc_distance"]),
        fov=fov,
        ga=ga,
        expert=table,
    )


def scenario_from_dict(doc: dict, name: str = "scenario") -> Scenario:
    """Build a scenario from a parsed document; raises ValidationError on
    structural problems (semantic problems are reported by validate())."""
    problems: list[str] = []
    try:
        area = doc["area"]
        grid = GridSpec(
            r=float(area["cell_size"]), cells_x=int(area["cells_x"]), cells_y=int(area["cells_y"])
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError([f"area: {exc}"])

    overrides = doc.get("overrides", {})
    uavs = []
    for entry in doc.get("uavs", []):
        spec = _build_uav(entry, overrides, problems)
        if spec is not None:
            uavs.append(spec)

    targets = []
    for i, t in enumerate(doc.get("targets", [])):
        try:
            targets.append(
                {
                    "id": int(t["id"]),
                    "position": [float(t["position"][0]), float(t["position"][1])],
                    "prior": [float(t.get("prior", t["position"])[0]), float(t.get("prior", t["position"])[1])],
                    "peak": float(t.get("peak", 0.3)),
                    "width": float(t.get("width", 50.0)),
                }
            )
        except (KeyError, TypeError, IndexError, ValueError) as exc:
            problems.append(f"targets[{i}]: {exc}")

    denied = []
    for i, d in enumerate(doc.get("denied_areas", [])):
        try:
            denied.append(
                {
                    "center": [float(d["center"][0]), float(d["center"][1])],
                    "radius": float(d.get("radius", 0.0)),
                    "vertices": d.get("vertices"),
                    "velocity": d.get("velocity", [0.0, 0.0]),
                    "speed": float(d.get("speed", 0.0)),
                }
            )
        except (KeyError, TypeError, IndexError, ValueError) as exc:
            problems.append(f"denied_areas[{i}]: {exc}")

    events = []
    for i, e in enumerate(doc.get("events", [])):
        try:
            events.append(Event(kind=str(e["kind"]), t=float(e["t"]), params={k: v for k, v in e.items() if k not in ("kind", "t")}))
        except (KeyError, TypeError, ValueError) as exc:
            problems.append(f"events[{i}]: {exc}")

    if problems:
        raise ValidationError(problems)

    time_cfg = doc.get("time", {})
    sensing = doc.get("sensing", {})
    rep = doc.get("repulsion", {})
    weights_cfg = doc.get("weights", {})
    return Scenario(
        name=doc.get("name", name),
        grid=grid,
        uavs=uavs,
        targets=targets,
        denied=denied,
        events=events,
        dt=float(time_cfg.get("dt", 1.0)),
        duration=float(time_cfg.get("duration", 300.0)),
        strategy=int(doc.get("strategy", 1)),
        p_detect=float(sensing.get("p_detect", 0.8)),
        p_false=float(sensing.get("p_false", 1e-4)),
        found_threshold=float(sensing.get("found_threshold", 0.95)),
        repulsion=RepulsionParams(
            k=float(rep.get("k", 10.0)), mu=float(rep.get("mu", 6e-3)), d_max=float(rep.get("d_max", 200.0))
        ),
        warning_distance=float(doc.get("expert", {}).get("warning_distance", 160.0)),
        history_length=int(doc.get("comms", {}).get("history_length", 100)),
        weights=Weights(
            w_prob=float(weights_cfg.get("w_prob", 10.0)),
            w_unc=float(weights_cfg.get("w_unc", 1.0)),
            w_col=float(weights_cfg.get("w_col", 5.0)),
        ),
        stop_when_all_found=bool(doc.get("stop_when_all_found", False)),
    )


def load_scenario(path: str | Path) -> Scenario:
    """Parse a scenario file.  JSON syntax errors surface with line/column;
    structural errors raise ValidationError with field paths."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError([f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}"])
    return scenario_from_dict(doc, name=path.stem)


def _validate(sc: Scenario) -> list[str]:
    problems: list[str] = []
    grid = sc.grid
    if sc.dt <= 0:
        problems.append("time.dt: must be positive")
    if sc.duration < sc.dt:
        problems.append("time.duration: must cover at least one decision interval")
    if sc.strategy not in (1, 2, 3):
        problems.append(f"strategy: must be 1, 2 or 3, got {sc.strategy}")
    if not 0.0 < sc.p_false < sc.p_detect <= 1.0:
        problems.append("sensing: need 0 < p_false < p_detect <= 1")
    if not 0.0 < sc.found_threshold <= 1.0:
        problems.append("sensing.found_threshold: must lie in (0, 1]")
    if sc.history_length < 1:
        problems.append("comms.history_length: must be at least 1")

    denied_objs = sc.build_denied()

    ids = [u.id for u in sc.uavs]
    if len(set(ids)) != len(ids):
        problems.append("uavs: duplicate ids")
    if any(i < 1 for i in ids):
        problems.append("uavs: ids must be positive integers")
    if not any(u.kind == "rotor" for u in sc.uavs):
        problems.append("uavs: at least one rotor is required")
    for u in sc.uavs:
        path = f"uavs[id={u.id}]"
        if not grid.in_bounds_cell(*u.spawn_cell):
            problems.append(f"{path}.spawn_cell: {u.spawn_cell} outside the grid")
        else:
            x = grid.r * (u.spawn_cell[0] - 0.5)
            y = grid.r * (u.spawn_cell[1] - 0.5)
            if any(a.contains(x, y) for a in denied_objs):
                problems.append(f"{path}.spawn_cell: inside a denied area")
        if u.v_max <= 0 or u.v_min < 0 or u.v_min >= u.v_max:
            problems.append(f"{path}: need 0 <= v_min < v_max")
        if u.a_max <= 0:
            problems.append(f"{path}.a_max: must be positive")
        elif not grid_supports_acceleration(grid.r, sc.dt, u.a_max):
            problems.append(
                f"{path}: grid too coarse for a_max={u.a_max} (worst-case turn "
                f"needs more than a_max at cell size {grid.r}, dt {sc.dt})"
            )
        elif not feasible_j_values(u.v_min, u.v_max, u.a_max, grid.r, sc.dt):
            problems.append(f"{path}: empty jump-value range for speed window "
                            f"[{u.v_min}, {u.v_max}] on this grid")
        if u.fov is not None and (u.fov.along <= 0 or u.fov.across <= 0 or u.fov.lead < 0):
            problems.append(f"{path}.fov: extents must be positive, lead non-negative")
        problems.extend(f"{path}.expert: {p}" for p in u.expert.validate())

    tids = [t["id"] for t in sc.targets]
    if len(set(tids)) != len(tids):
        problems.append("targets: duplicate ids")
    for t in sc.targets:
        path = f"targets[id={t['id']}]"
        for key in ("position", "prior"):
            x, y = t[key]
            if not (0.0 <= x <= grid.width and 0.0 <= y <= grid.height):
                problems.append(f"{path}.{key}: ({x}, {y}) outside the task area")
        if any(a.contains(*t["position"]) for a in denied_objs):
            problems.append(f"{path}.position: inside a denied area (unreachable by sensing)")
        if not 0.0 < t["peak"] <= 1.0:
            problems.append(f"{path}.peak: must lie in (0, 1]")
        if t["width"] <= 0:
            problems.append(f"{path}.width: must be positive")

    for i, d in enumerate(sc.denied):
        x, y = d["center"]
        if not (0.0 <= x <= grid.width and 0.0 <= y <= grid.height):
            problems.append(f"denied_areas[{i}].center: outside the task area")

    uav_ids = set(ids)
    target_ids = set(tids)
    for i, e in enumerate(sc.events):
        path = f"events[{i}]"
        if e.kind not in EVENT_KINDS:
            problems.append(f"{path}.kind: unknown event kind {e.kind!r}")
            continue
        if e.t < 0:
            problems.append(f"{path}.t: must be non-negative")
        if e.kind in ("dropout", "range_change") and e.params.get("uav") not in uav_ids:
            problems.append(f"{path}.uav: no such vehicle {e.params.get('uav')!r}")
        if e.kind == "range_change" and float(e.params.get("com_distance", -1.0)) < 0:
            problems.append(f"{path}.com_distance: must be non-negative")
        if e.kind == "target_move":
            if e.params.get("target") not in target_ids:
                problems.append(f"{path}.target: no such target {e.params.get('target')!r}")
            to = e.params.get("to")
            if not (isinstance(to, (list, tuple)) and len(to) == 2):
                problems.append(f"{path}.to: expected [x, y]")
    return problems
