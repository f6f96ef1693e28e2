import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conflictzones import fixtures
from conflictzones import io as cio
from conflictzones.scenario import config_from_mapping
from conflictzones.utility import RESOURCES, Resource, ResourceLayer
from conflictzones.world import Country, CountryKind, GridSpec, build_world

DATA = Path(__file__).resolve().parents[1] / "src" / "conflictzones" / "data"


def load_bundled(name):
    d = DATA / name
    countries = cio.parse_countries((d / "countries.csv").read_text())
    world = cio.parse_world((d / "world.csv").read_text(), countries)
    layers = {r: cio.parse_layer((d / f"{r.value}.csv").read_text(), world, r) for r in RESOURCES}
    return world, layers


@pytest.fixture(scope="session")
def arctic():
    return load_bundled("arctic")


@pytest.fixture(scope="session")
def arctic_config():
    config, _ = config_from_mapping({"maritime": {"importance": fixtures.ARCTIC_IMPORTANCE}})
    return config


@pytest.fixture(scope="session")
def dual_zone():
    return load_bundled("dual_zone")


def small_world():
    """3x3 grid, RU owns the south-west corner, NO the south-east, JP has an anchor."""
    grid = GridSpec.regular(3, 3, (66.0, 72.0), (0.0, 30.0))
    countries = [
        Country("RU", CountryKind.ARCTIC),
        Country("NO", CountryKind.ARCTIC),
        Country("JP", CountryKind.NON_ARCTIC, (35.44, 139.64)),
    ]
    owners = ["RU", None, "NO",
              None, None, None,
              None, None, None]
    return build_world(grid, countries, owners)


def small_layers(world):
    """Two live resources (gas, maritime); oil and fish are empty."""
    gas = np.array([4.0, 0.0, 7.5,
                    10.0, 2.0, 0.0,
                    0.0, 6.0, 3.0])
    route = np.array([1.0, 1.0, 1.0,
                      0.0, 1.0, 0.0,
                      0.0, 1.0, 0.0])
    return {
        Resource.OIL: ResourceLayer.zeros(Resource.OIL, world.size),
        Resource.GAS: ResourceLayer(Resource.GAS, gas),
        Resource.FISH: ResourceLayer.zeros(Resource.FISH, world.size),
        Resource.MARITIME: ResourceLayer(Resource.MARITIME, route),
    }


_ACCEPTANCE: dict[str, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        outcome = "PASS" if report.outcome == "passed" else "FAIL"
        _ACCEPTANCE[name] = (outcome, report.nodeid)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        outcome, _ = _ACCEPTANCE[name]
        terminalreporter.write_line(f"{outcome}  {name}")
