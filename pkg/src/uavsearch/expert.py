"""Online parameter selection from task state.

Two rule tables drive per-decision tuning: system 1 keys on how close the
vehicle is to the nearest (believed) target, scaled by a warning distance,
and picks the jump value plus the collision-weight correction; system 2
keys on the fraction of targets already discovered and picks the
probability/uncertainty weight corrections and the prediction horizon.
Rows are data (scenario-overridable); the defaults below suit rotor
vehicles, with a doubled-jump variant for the fast fixed-wing relay.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ValidationError

__all__ = [
    "ExpertInputs",
    "ExpertOutput",
    "ExpertTable",
    "eval_expert",
    "closest_target_distance",
    "default_rotor_table",
    "default_fixed_wing_table",
]


@dataclass(frozen=True)
class ExpertInputs:
    """Normalized task-state signals for one vehicle at one decision."""

    target_distance: float  # meters to the nearest believed target
    warning_distance: float  # scale for target_distance
    n_found: int  # targets this vehicle knows to be discovered
    n_total: int  # targets declared in the scenario


@dataclass(frozen=True)
class ExpertOutput:
    j: int
    k_col: float
    k_prob: float
    k_unc: float
    horizon: int


@dataclass
class ExpertTable:
    """Rule rows, each owning a half-open input interval [lo, hi).

    system1 rows: (lo, hi, j, k_col); system2 rows: (lo, hi, k_prob, k_unc,
    horizon).  Together the rows of each system must tile [0, inf) exactly.
    """

    system1: list[tuple[float, float, int, float]] = field(default_factory=list)
    system2: list[tuple[float, float, float, float, int]] = field(default_factory=list)

    def validate(self) -> list[str]:
        problems = []
        for name, rows in (("system1", self.system1), ("system2", self.system2)):
            if not rows:
                problems.append(f"expert {name}: no rows")
                continue
            if rows[0][0] != 0.0:
                problems.append(f"expert {name}: first row must start at 0")
            for i in range(len(rows) - 1):
                if rows[i][1] != rows[i + 1][0]:
                    problems.append(
                        f"expert {name}: gap or overlap between rows {i} and {i + 1}"
                        f" ({rows[i][1]} vs {rows[i + 1][0]})"
                    )
            if not math.isinf(rows[-1][1]):
                problems.append(f"expert {name}: last row must extend to infinity")
            for i, row in enumerate(rows):
                if row[1] <= row[0]:
                    problems.append(f"expert {name} row {i}: empty interval")
        return problems


def default_rotor_table() -> ExpertTable:
    return ExpertTable(
        system1=[
            (0.0, 1.0, 2, 2.0),
            (1.0, 2.0, 4, 1.0),
            (2.0, math.inf, 6, 0.8),
        ],
        system2=[
            (0.0, 0.8, 1.0, 1.0, 8),
            (0.8, 1.0, 0.8, 1.2, 10),
            (1.0, math.inf, 0.4, 1.6, 12),
        ],
    )


def default_fixed_wing_table() -> ExpertTable:
    """Rotor table with doubled jump values (the relay flies about twice as
    fast) and horizons in the relay's longer genome range."""
    return ExpertTable(
        system1=[
            (0.0, 1.0, 4, 2.0),
            (1.0, 2.0, 8, 1.0),
            (2.0, math.inf, 12, 0.8),
        ],
        system2=[
            (0.0, 0.8, 1.0, 1.0, 10),
            (0.8, 1.0, 0.8, 1.2, 12),
            (1.0, math.inf, 0.4, 1.6, 15),
        ],
    )


def _pick(rows, value):
    for row in rows:
        # an infinite input (no targets known) belongs to the open last row
        if row[0] <= value < row[1] or (math.isinf(value) and math.isinf(row[1])):
            return row
    raise ValidationError(f"expert table does not cover input {value}")


def eval_expert(
    inputs: ExpertInputs,
    table: ExpertTable,
    feasible_j: list[int] | None = None,
) -> ExpertOutput:
    """Select parameters from the rule rows; a pure step function of the
    two normalized inputs.

    With no targets declared the discovery ratio is defined as 1 (all of
    nothing found).  The selected jump value is clamped into the vehicle's
    feasible range when one is supplied.
    """
    e1 = inputs.target_distance / inputs.warning_distance
    e2 = 1.0 if inputs.n_total == 0 else inputs.n_found / inputs.n_total
    _, _, j, k_col = _pick(table.system1, e1)
    _, _, k_prob, k_unc, horizon = _pick(table.system2, e2)
    if feasible_j:
        j = min(max(j, feasible_j[0]), feasible_j[-1])
    return ExpertOutput(j=j, k_col=k_col, k_prob=k_prob, k_unc=k_unc, horizon=horizon)


def closest_target_distance(pos: tuple[float, float], positions) -> float:
    """Euclidean distance to the nearest of the given reference positions.

    Callers pass each target's believed location (its recorded position
    once discovered, the prior before that).  An empty list yields +inf,
    which lands in the far-distance expert row.
    """
    best = math.inf
    for tx, ty in positions:
        best = min(best, math.hypot(pos[0] - tx, pos[1] - ty))
    return best
