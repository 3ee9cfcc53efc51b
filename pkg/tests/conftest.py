import json
from pathlib import Path

import pytest

from uavsearch.scenario import load_scenario, scenario_from_dict

REPO = Path(__file__).resolve().parent.parent
SCENARIOS = REPO / "scenarios"


@pytest.fixture(scope="session")
def block_scenario():
    return load_scenario(SCENARIOS / "block_area.json")


@pytest.fixture(scope="session")
def block_scenario_path():
    return SCENARIOS / "block_area.json"


def small_scenario_doc():
    """A 400x200 m toy world that runs in a second or two."""
    return {
        "name": "small",
        "area": {"cell_size": 4.0, "cells_x": 100, "cells_y": 50},
        "time": {"dt": 1.0, "duration": 40},
        "strategy": 1,
        "uavs": [
            {"id": 1, "kind": "rotor", "spawn_cell": [10, 15]},
            {"id": 2, "kind": "rotor", "spawn_cell": [10, 35]},
            {"id": 3, "kind": "fixed_wing", "spawn_cell": [50, 25]},
        ],
        "targets": [
            {"id": 1, "position": [150, 120], "prior": [146, 112]},
            {"id": 2, "position": [300, 60], "prior": [306, 68]},
        ],
        "denied_areas": [{"center": [220, 120], "radius": 30}],
        "events": [],
    }


@pytest.fixture()
def small_scenario():
    return scenario_from_dict(small_scenario_doc())


@pytest.fixture()
def scenario_file(tmp_path):
    """Write a scenario doc to disk and return its path."""

    def _write(doc, name="scenario.json"):
        p = tmp_path / name
        p.write_text(json.dumps(doc))
        return p

    return _write
