"""Gridded region, country ownership and per-country distance fields."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np

EARTH_RADIUS_KM = 6371.0
DEFAULT_SOUTHERN_BOUND = 66.0
INTERNATIONAL = "INTL"


class WorldError(ValueError):
    """Raised when grid, country or ownership data is inconsistent."""


class CountryKind(str, Enum):
    ARCTIC = "Arctic"
    NON_ARCTIC = "NonArctic"


def _frozen(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GridSpec:
    """Row-major grid of cells, each described by its center (lat, lon) in degrees."""

    rows: int
    cols: int
    lats: np.ndarray
    lons: np.ndarray
    southern_bound: float = DEFAULT_SOUTHERN_BOUND

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise WorldError(f"grid must be at least 1x1, got {self.rows}x{self.cols}")
        lats = _frozen(self.lats, float)
        lons = _frozen(self.lons, float)
        object.__setattr__(self, "lats", lats)
        object.__setattr__(self, "lons", lons)
        n = self.rows * self.cols
        if lats.shape != (n,) or lons.shape != (n,):
            raise WorldError(
                f"expected {n} cell centers for a {self.rows}x{self.cols} grid, "
                f"got {lats.size} latitudes and {lons.size} longitudes"
            )
        if np.any(lats > 90.0) or np.any(lats < self.southern_bound):
            raise WorldError(f"cell latitudes must lie in [{self.southern_bound}, 90]")
        if np.any(lons < -180.0) or np.any(lons >= 180.0):
            raise WorldError("cell longitudes must lie in [-180, 180)")

    def __eq__(self, other):
        if not isinstance(other, GridSpec):
            return NotImplemented
        return (
            (self.rows, self.cols, self.southern_bound) == (other.rows, other.cols, other.southern_bound)
            and np.array_equal(self.lats, other.lats)
            and np.array_equal(self.lons, other.lons)
        )

    __hash__ = None

    @property
    def size(self) -> int:
        return self.rows * self.cols

    @classmethod
    def regular(cls, rows, cols, lat_range, lon_range, southern_bound=DEFAULT_SOUTHERN_BOUND):
        """Evenly spaced cell centers; row 0 is the southernmost band."""
        (lat0, lat1), (lon0, lon1) = lat_range, lon_range
        dlat = (lat1 - lat0) / rows
        dlon = (lon1 - lon0) / cols
        lats = [lat0 + dlat * (r + 0.5) for r in range(rows) for _ in range(cols)]
        lons = [lon0 + dlon * (c + 0.5) for _ in range(rows) for c in range(cols)]
        return cls(rows, cols, lats, lons, southern_bound)

    def center(self, cell: int) -> tuple[float, float]:
        return float(self.lats[cell]), float(self.lons[cell])

    def index(self, row: int, col: int) -> int:
        return row * self.cols + col


@dataclass(frozen=True)
class Country:
    code: str
    kind: CountryKind
    # Home-port coordinate used as distance origin when the country owns no cells.
    anchor: tuple[float, float] | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", CountryKind(self.kind))
        if not self.code or self.code == INTERNATIONAL or "," in self.code:
            raise WorldError(f"invalid country code {self.code!r}")

    @property
    def is_arctic(self) -> bool:
        return self.kind is CountryKind.ARCTIC


@dataclass(frozen=True)
class World:
    """Grid geometry plus per-cell ownership.

    ``owners[c]`` is a country code, or ``None`` for international waters.
    ``cell_ids`` are the external identifiers of the cells in row-major order.
    """

    grid: GridSpec
    countries: tuple[Country, ...]
    owners: tuple[str | None, ...]
    cell_ids: tuple[str, ...] = field(default=())

    @property
    def size(self) -> int:
        return self.grid.size

    @property
    def codes(self) -> tuple[str, ...]:
        return tuple(c.code for c in self.countries)

    def country(self, code: str) -> Country:
        for c in self.countries:
            if c.code == code:
                return c
        raise WorldError(f"unknown country code {code!r}")

    def owned_mask(self, code: str) -> np.ndarray:
        return np.array([o == code for o in self.owners], dtype=bool)

    def international_mask(self) -> np.ndarray:
        return np.array([o is None for o in self.owners], dtype=bool)

    def foreign_mask(self, code: str) -> np.ndarray:
        """Cells inside some other country's EEZ."""
        return np.array([o is not None and o != code for o in self.owners], dtype=bool)

    def cell_status(self, cell: int, code: str) -> str:
        owner = self.owners[cell]
        if owner is None:
            return "International"
        return "Owned" if owner == code else "Foreign"

    def relabeled_international(self) -> "World":
        """Same grid and countries with every cell reassigned to international waters."""
        return World(self.grid, self.countries, (None,) * self.size, self.cell_ids)


def build_world(
    grid: GridSpec,
    countries: Iterable[Country],
    ownership: Sequence[str | None],
    cell_ids: Sequence[str] | None = None,
) -> World:
    """Validate and assemble a :class:`World`.

    ``ownership`` holds one entry per cell in row-major order: a declared
    country code, or ``None`` / ``"INTL"`` for international waters.
    """
    countries = tuple(countries)
    codes = [c.code for c in countries]
    if len(set(codes)) != len(codes):
        raise WorldError(f"duplicate country codes in {codes}")
    if len(ownership) != grid.size:
        raise WorldError(f"ownership has {len(ownership)} entries, grid has {grid.size} cells")
    kinds = {c.code: c.kind for c in countries}
    owners = []
    for cell, owner in enumerate(ownership):
        if owner is None or owner == INTERNATIONAL:
            owners.append(None)
            continue
        if owner not in kinds:
            raise WorldError(f"cell {cell} assigned to undeclared country {owner!r}")
        if kinds[owner] is CountryKind.NON_ARCTIC:
            raise WorldError(f"non-Arctic country {owner!r} cannot own cell {cell}")
        owners.append(owner)
    if cell_ids is None:
        width = len(str(grid.size - 1))
        cell_ids = [f"c{i:0{width}d}" for i in range(grid.size)]
    cell_ids = tuple(str(c) for c in cell_ids)
    if len(cell_ids) != grid.size:
        raise WorldError(f"{len(cell_ids)} cell ids for {grid.size} cells")
    if len(set(cell_ids)) != len(cell_ids):
        raise WorldError("duplicate cell ids")
    return World(grid, countries, tuple(owners), cell_ids)


def great_circle_km(p: tuple[float, float], q: tuple[float, float]) -> float:
    """Haversine distance between two (lat, lon) points on a 6371 km sphere."""
    lat1, lon1 = map(math.radians, p)
    lat2, lon2 = map(math.radians, q)
    a = (
        math.sin((lat2 - lat1) / 2) ** 2
        + math.cos(lat1) * math.cos(lat2) * math.sin((lon2 - lon1) / 2) ** 2
    )
    return 2 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(a)))


def _haversine_matrix(lat1, lon1, lat2, lon2) -> np.ndarray:
    lat1, lon1 = np.radians(lat1)[:, None], np.radians(lon1)[:, None]
    lat2, lon2 = np.radians(lat2)[None, :], np.radians(lon2)[None, :]
    a = np.sin((lat2 - lat1) / 2) ** 2 + np.cos(lat1) * np.cos(lat2) * np.sin((lon2 - lon1) / 2) ** 2
    return 2 * EARTH_RADIUS_KM * np.arcsin(np.minimum(1.0, np.sqrt(a)))


@dataclass(frozen=True)
class DistanceField:
    country: str
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values, float))


def distance_field(world: World, country: str) -> DistanceField:
    """Per-cell distance (km) from ``country``.

    Zero on the country's own cells, otherwise the minimum great-circle
    distance to any of its cell centers. Countries owning no cells are
    measured from their anchor point. Ownership by other countries does
    not affect the value.
    """
    c = world.country(country)
    grid = world.grid
    owned = world.owned_mask(country)
    if owned.any():
        d = _haversine_matrix(grid.lats, grid.lons, grid.lats[owned], grid.lons[owned]).min(axis=1)
        d[owned] = 0.0
    elif c.anchor is not None:
        lat, lon = c.anchor
        d = _haversine_matrix(grid.lats, grid.lons, np.array([lat]), np.array([lon]))[:, 0]
    else:
        raise WorldError(f"country {country!r} owns no cells and has no anchor point")
    return DistanceField(country, d)


def distance_fields(world: World) -> Mapping[str, DistanceField]:
    return {code: distance_field(world, code) for code in world.codes}
