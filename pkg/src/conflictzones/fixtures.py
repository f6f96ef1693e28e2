"""Synthetic worlds used by the tests, the bundled data set and the scripts.

Nothing here is survey data. Deposit magnitudes, fish ranges and routes are
stylized so that the qualitative features of interest (a contested
high-deposit basin between two EEZs, route corridors through EEZs and
international water) are present on a coarse grid.
"""

from __future__ import annotations

import numpy as np

from .utility import Resource, ResourceLayer
from .world import Country, CountryKind, GridSpec, World, build_world

ARCTIC = CountryKind.ARCTIC
NON_ARCTIC = CountryKind.NON_ARCTIC

ARCTIC_COUNTRIES = (
    Country("CA", ARCTIC),
    Country("DK", ARCTIC),
    Country("IS", ARCTIC),
    Country("NO", ARCTIC),
    Country("RU", ARCTIC),
    Country("US", ARCTIC),
    Country("CN", NON_ARCTIC, (31.23, 121.47)),
    Country("JP", NON_ARCTIC, (35.44, 139.64)),
    Country("KR", NON_ARCTIC, (35.10, 129.04)),
)

ARCTIC_IMPORTANCE = {"CN": 0.9, "JP": 0.8, "KR": 0.7}

ROWS, COLS = 8, 16
# Contested international cell between the Norwegian and Russian EEZs.
BARENTS_CELL = (4, 9)

# column -> (owner, number of southern rows inside its EEZ)
_SECTORS = {
    0: ("US", 3), 1: ("US", 3),
    2: ("CA", 3), 3: ("CA", 3), 4: ("CA", 3),
    5: ("DK", 3), 6: ("DK", 3),
    7: ("IS", 2),
    8: ("NO", 4), 9: ("NO", 4),
    10: ("RU", 4), 11: ("RU", 4), 12: ("RU", 4), 13: ("RU", 4), 14: ("RU", 3), 15: ("RU", 3),
}


def arctic_world() -> World:
    """8 x 16 grid from 66N to 86N over all longitudes, nine countries."""
    grid = GridSpec.regular(ROWS, COLS, (66.0, 86.0), (-180.0, 180.0))
    owners = []
    for r in range(ROWS):
        for c in range(COLS):
            code, depth = _SECTORS[c]
            owners.append(code if r < depth else None)
    return build_world(grid, ARCTIC_COUNTRIES, owners)


def arctic_layers(world: World, seed: int = 2015) -> dict[Resource, ResourceLayer]:
    rng = np.random.default_rng(seed)
    shape = (ROWS, COLS)
    rows = np.arange(ROWS)[:, None] * np.ones(COLS)

    # Shelf basins: deposits concentrate in the southern (shelf) rows.
    shelf = np.clip(4 - rows, 0, None)
    oil = np.round(shelf * rng.uniform(0.0, 6.0, shape), 2)
    gas = np.round(shelf * rng.uniform(0.0, 9.0, shape), 2)
    oil[rng.uniform(size=shape) < 0.35] = 0.0
    gas[rng.uniform(size=shape) < 0.25] = 0.0
    # Year-round fish range: presence in Atlantic and Pacific sectors plus scattered patches.
    fish = np.zeros(shape)
    fish[:4, 6:11] = 1.0
    fish[:3, 0:2] = 1.0
    fish[:3, 14:16] = 1.0
    fish[(rng.uniform(size=shape) < 0.1) & (rows < 5)] = 1.0

    br, bc = BARENTS_CELL
    oil[br, bc], gas[br, bc], fish[br, bc] = 60.0, 90.0, 3.0
    # Second tier of the basin inside the neighbouring EEZs.
    oil[br - 1, bc], gas[br - 1, bc + 1] = 25.0, 35.0

    maritime = np.zeros(shape)
    route = np.full(shape, "", dtype=object)
    maritime[2, 8:16] = 1.0
    route[2, 8:16] = "NSR"
    maritime[2, 0:6] = 1.0
    route[2, 0:6] = "NWP"
    maritime[7, :] = 1.0
    route[7, :] = "TSR"
    maritime[3, 8], maritime[br, bc] = 1.0, 1.0
    route[3, 8], route[br, bc] = "NSR", "NSR"

    route_ids = tuple(r or None for r in route.ravel())
    return {
        Resource.OIL: ResourceLayer(Resource.OIL, oil.ravel()),
        Resource.GAS: ResourceLayer(Resource.GAS, gas.ravel()),
        Resource.FISH: ResourceLayer(Resource.FISH, fish.ravel()),
        Resource.MARITIME: ResourceLayer(Resource.MARITIME, maritime.ravel(), route_ids),
    }


def barents_cell(world: World) -> int:
    return world.grid.index(*BARENTS_CELL)


DUAL_COUNTRIES = (
    Country("AA", ARCTIC),
    Country("BB", ARCTIC),
    Country("CC", ARCTIC),
    Country("XX", NON_ARCTIC, (40.0, 0.0)),
)


def dual_zone_world() -> World:
    """6 x 9 grid: three adjacent EEZ blocks in the south, high seas to the north."""
    grid = GridSpec.regular(6, 9, (66.0, 84.0), (-45.0, 45.0))
    owners = []
    for r in range(6):
        for c in range(9):
            owners.append(("AA", "BB", "CC")[c // 3] if r < 3 else None)
    return build_world(grid, DUAL_COUNTRIES, owners)


def dual_zone_layers(world: World, seed: int = 7) -> dict[Resource, ResourceLayer]:
    """Comparable deposits on both sides of the EEZ boundary."""
    rng = np.random.default_rng(seed)
    shape = (6, 9)
    layers = {}
    for r in (Resource.OIL, Resource.GAS, Resource.FISH):
        values = np.round(rng.uniform(1.0, 10.0, shape), 2)
        values[rng.uniform(size=shape) < 0.3] = 0.0
        layers[r] = ResourceLayer(r, values.ravel())
    maritime = np.zeros(shape)
    maritime[2, :] = 1.0
    maritime[4, :] = 1.0
    layers[Resource.MARITIME] = ResourceLayer(Resource.MARITIME, maritime.ravel())
    return layers
