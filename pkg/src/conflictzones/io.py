"""CSV ingestion and result writers.

Schemas (header row required, one record per line):

* countries: ``code,kind,anchor_lat,anchor_lon`` (anchor optional, kind ``Arctic``/``NonArctic``)
* world:     ``cell_id,row,col,lat,lon,owner`` (owner is a country code or ``INTL``)
* layer:     ``cell_id,resource,value[,route_id]`` (unlisted cells are 0)
* classes:   ``cell_id,row,col,class``
* forecasts: ``cell_id,row,col,oil,gas,fish,maritime``

Writers order records by cell id and format reals as the shortest decimal
that round-trips, so identical inputs give identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .scenario import RunComparison, RunResult
from .utility import RESOURCES, Resource, ResourceLayer
from .world import INTERNATIONAL, Country, CountryKind, GridSpec, World, WorldError, build_world

COUNTRY_HEADER = ["code", "kind", "anchor_lat", "anchor_lon"]
WORLD_HEADER = ["cell_id", "row", "col", "lat", "lon", "owner"]
LAYER_HEADER = ["cell_id", "resource", "value"]
CLASS_HEADER = ["cell_id", "row", "col", "class"]
FORECAST_HEADER = ["cell_id", "row", "col"] + [r.value for r in RESOURCES]


class ParseError(ValueError):
    def __init__(self, source: str, line: int | None, column: str | None, message: str):
        self.source, self.line, self.column = source, line, column
        where = source
        if line is not None:
            where += f", line {line}"
        if column is not None:
            where += f", field {column!r}"
        super().__init__(f"{where}: {message}")


def fmt(x: float) -> str:
    return repr(float(x))


def _records(text: str, header: Sequence[str], source: str, optional: Sequence[str] = ()):
    """Yield ``(line_number, {column: value})`` for every data row."""
    reader = csv.reader(io.StringIO(text))
    try:
        first = next(reader)
    except StopIteration:
        raise ParseError(source, 1, None, "missing header") from None
    got = [h.strip() for h in first]
    allowed = list(header) + list(optional)
    if got[: len(header)] != list(header) or any(h not in allowed for h in got):
        raise ParseError(source, 1, None, f"expected header {','.join(header)}, got {','.join(got)}")
    for row in reader:
        if not row or all(not f.strip() for f in row):
            continue
        if len(row) != len(got):
            raise ParseError(source, reader.line_num, None, f"expected {len(got)} fields, got {len(row)}")
        yield reader.line_num, {h: f.strip() for h, f in zip(got, row)}


def _num(rec: dict, key: str, source: str, line: int, cast=float):
    try:
        value = cast(rec[key])
    except ValueError:
        raise ParseError(source, line, key, f"cannot parse {rec[key]!r}") from None
    if isinstance(value, float) and not math.isfinite(value):
        raise ParseError(source, line, key, f"non-finite value {rec[key]!r}")
    return value


# --- countries -------------------------------------------------------------

def parse_countries(text: str, source: str = "countries.csv") -> list[Country]:
    countries, seen = [], set()
    for line, rec in _records(text, COUNTRY_HEADER[:2], source, COUNTRY_HEADER[2:]):
        code = rec["code"]
        if not code:
            raise ParseError(source, line, "code", "empty country code")
        if code in seen:
            raise ParseError(source, line, "code", f"duplicate country {code!r}")
        try:
            kind = CountryKind(rec["kind"])
        except ValueError:
            raise ParseError(source, line, "kind", f"kind must be Arctic or NonArctic, got {rec['kind']!r}") from None
        lat, lon = rec.get("anchor_lat", ""), rec.get("anchor_lon", "")
        anchor = None
        if lat or lon:
            anchor = (_num(rec, "anchor_lat", source, line), _num(rec, "anchor_lon", source, line))
        try:
            countries.append(Country(code, kind, anchor))
        except WorldError as exc:
            raise ParseError(source, line, "code", str(exc)) from None
        seen.add(code)
    return countries


def write_countries(countries: Iterable[Country]) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(COUNTRY_HEADER)
    for c in countries:
        anchor = [fmt(c.anchor[0]), fmt(c.anchor[1])] if c.anchor else ["", ""]
        w.writerow([c.code, c.kind.value, *anchor])
    return out.getvalue()


# --- world -----------------------------------------------------------------

def parse_world(
    text: str,
    countries: Sequence[Country],
    source: str = "world.csv",
    southern_bound: float = 66.0,
) -> World:
    codes = {c.code for c in countries}
    cells: dict[tuple[int, int], tuple[str, float, float, str | None]] = {}
    ids: set[str] = set()
    for line, rec in _records(text, WORLD_HEADER, source):
        cid = rec["cell_id"]
        if not cid:
            raise ParseError(source, line, "cell_id", "empty cell id")
        if cid in ids:
            raise ParseError(source, line, "cell_id", f"duplicate cell id {cid!r}")
        r = _num(rec, "row", source, line, int)
        c = _num(rec, "col", source, line, int)
        if r < 0 or c < 0:
            raise ParseError(source, line, "row" if r < 0 else "col", "negative grid index")
        if (r, c) in cells:
            raise ParseError(source, line, "row", f"grid position ({r}, {c}) listed twice")
        lat = _num(rec, "lat", source, line)
        lon = _num(rec, "lon", source, line)
        owner = rec["owner"]
        if owner != INTERNATIONAL and owner not in codes:
            raise ParseError(source, line, "owner", f"unknown country {owner!r}")
        ids.add(cid)
        cells[r, c] = (cid, lat, lon, None if owner == INTERNATIONAL else owner)
    if not cells:
        raise ParseError(source, None, None, "no cells")
    rows = 1 + max(r for r, _ in cells)
    cols = 1 + max(c for _, c in cells)
    missing = [(r, c) for r in range(rows) for c in range(cols) if (r, c) not in cells]
    if missing:
        raise ParseError(source, None, None, f"grid is {rows}x{cols} but position {missing[0]} is missing")
    ordered = [cells[r, c] for r in range(rows) for c in range(cols)]
    try:
        grid = GridSpec(rows, cols, [o[1] for o in ordered], [o[2] for o in ordered], southern_bound)
        return build_world(grid, countries, [o[3] for o in ordered], [o[0] for o in ordered])
    except WorldError as exc:
        raise ParseError(source, None, None, str(exc)) from None


def write_world(world: World) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(WORLD_HEADER)
    cols = world.grid.cols
    for cell in sorted(range(world.size), key=lambda i: world.cell_ids[i]):
        lat, lon = world.grid.center(cell)
        owner = world.owners[cell] or INTERNATIONAL
        w.writerow([world.cell_ids[cell], cell // cols, cell % cols, fmt(lat), fmt(lon), owner])
    return out.getvalue()


# --- layers ----------------------------------------------------------------

def parse_layer(
    text: str,
    world: World,
    resource: Resource | str | None = None,
    source: str = "layer.csv",
) -> ResourceLayer:
    """Read one resource layer; the resource is taken from the rows if not given."""
    index = {cid: i for i, cid in enumerate(world.cell_ids)}
    values = np.zeros(world.size)
    routes: list[str | None] = [None] * world.size
    has_routes = False
    seen: set[str] = set()
    resource = None if resource is None else Resource(resource)
    for line, rec in _records(text, LAYER_HEADER, source, ["route_id"]):
        has_routes = has_routes or "route_id" in rec
        try:
            r = Resource(rec["resource"])
        except ValueError:
            raise ParseError(source, line, "resource", f"unknown resource {rec['resource']!r}") from None
        if resource is None:
            resource = r
        elif r is not resource:
            raise ParseError(source, line, "resource", f"expected {resource.value}, got {r.value}")
        cid = rec["cell_id"]
        if cid not in index:
            raise ParseError(source, line, "cell_id", f"unknown cell id {cid!r}")
        if cid in seen:
            raise ParseError(source, line, "cell_id", f"cell {cid!r} listed twice")
        seen.add(cid)
        v = _num(rec, "value", source, line)
        if v < 0:
            raise ParseError(source, line, "value", f"negative value {v}")
        values[index[cid]] = v
        if rec.get("route_id"):
            routes[index[cid]] = rec["route_id"]
    if resource is None:
        raise ParseError(source, None, "resource", "empty layer and no resource given")
    return ResourceLayer(resource, values, tuple(routes) if has_routes else None)


def write_layer(layer: ResourceLayer, world: World) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    header = LAYER_HEADER + (["route_id"] if layer.route_ids is not None else [])
    w.writerow(header)
    for cell in sorted(range(world.size), key=lambda i: world.cell_ids[i]):
        v = layer.values[cell]
        if v == 0:
            continue
        row = [world.cell_ids[cell], layer.resource.value, fmt(v)]
        if layer.route_ids is not None:
            row.append(layer.route_ids[cell] or "")
        w.writerow(row)
    return out.getvalue()


# --- results ---------------------------------------------------------------

@dataclass(frozen=True)
class CellTable:
    """Per-cell integer columns keyed by cell id, as stored in result files."""

    cell_ids: tuple[str, ...]
    rows: tuple[int, ...]
    cols: tuple[int, ...]
    columns: Mapping[str, tuple[int, ...]]

    @property
    def shape(self) -> tuple[int, int]:
        return 1 + max(self.rows), 1 + max(self.cols)

    def grid_array(self, column: str) -> np.ndarray:
        arr = np.zeros(self.shape, dtype=np.int64)
        arr[list(self.rows), list(self.cols)] = self.columns[column]
        return arr


def _cell_rows(world: World):
    cols = world.grid.cols
    for cell in sorted(range(world.size), key=lambda i: world.cell_ids[i]):
        yield cell, [world.cell_ids[cell], cell // cols, cell % cols]


def write_classes(world: World, classes: Sequence[int]) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CLASS_HEADER)
    for cell, prefix in _cell_rows(world):
        w.writerow(prefix + [int(classes[cell])])
    return out.getvalue()


def write_forecasts(result: RunResult) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(FORECAST_HEADER)
    for cell, prefix in _cell_rows(result.world):
        w.writerow(prefix + [int(result.forecasts[r].grades[cell]) for r in RESOURCES])
    return out.getvalue()


def _parse_table(text: str, header: Sequence[str], source: str) -> CellTable:
    ids, rows, cols = [], [], []
    data: dict[str, list[int]] = {h: [] for h in header[3:]}
    seen: set[str] = set()
    for line, rec in _records(text, header, source):
        if rec["cell_id"] in seen:
            raise ParseError(source, line, "cell_id", f"duplicate cell id {rec['cell_id']!r}")
        seen.add(rec["cell_id"])
        ids.append(rec["cell_id"])
        rows.append(_num(rec, "row", source, line, int))
        cols.append(_num(rec, "col", source, line, int))
        for h in data:
            v = _num(rec, h, source, line, int)
            if v < 0:
                raise ParseError(source, line, h, f"negative value {v}")
            data[h].append(v)
    if not ids:
        raise ParseError(source, None, None, "no cells")
    return CellTable(tuple(ids), tuple(rows), tuple(cols), {h: tuple(v) for h, v in data.items()})


def parse_classes(text: str, source: str = "classes.csv") -> CellTable:
    return _parse_table(text, CLASS_HEADER, source)


def parse_forecasts(text: str, source: str = "forecasts.csv") -> CellTable:
    return _parse_table(text, FORECAST_HEADER, source)


def classes_for_world(table: CellTable, world: World, source: str = "classes.csv") -> np.ndarray:
    """Reorder a parsed class table onto ``world``'s cells."""
    index = {cid: i for i, cid in enumerate(world.cell_ids)}
    if set(table.cell_ids) != set(index):
        raise ParseError(source, None, "cell_id", "cell ids do not match the world")
    out = np.zeros(world.size, dtype=np.int64)
    for cid, k in zip(table.cell_ids, table.columns["class"]):
        out[index[cid]] = k
    return out


def render_pgm(grid: np.ndarray, n_classes: int) -> str:
    """Plain (P2) PGM with one class value per cell, one grid row per line."""
    grid = np.atleast_2d(np.asarray(grid, dtype=np.int64))
    if grid.size and (grid.min() < 0 or grid.max() > n_classes - 1):
        raise ValueError(f"class values must lie in [0, {n_classes - 1}]")
    rows, cols = grid.shape
    lines = ["P2", f"{cols} {rows}", str(n_classes - 1)]
    lines += [" ".join(str(int(v)) for v in row) for row in grid]
    return "\n".join(lines) + "\n"


def parse_pgm(text: str, source: str = "raster.pgm") -> tuple[np.ndarray, int]:
    tokens = text.split()
    if not tokens or tokens[0] != "P2":
        raise ParseError(source, 1, None, "not a plain PGM (P2) file")
    try:
        cols, rows, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
        body = [int(t) for t in tokens[4:]]
    except (IndexError, ValueError):
        raise ParseError(source, None, None, "malformed PGM header or body") from None
    if len(body) != rows * cols:
        raise ParseError(source, None, None, f"expected {rows * cols} values, got {len(body)}")
    return np.array(body, dtype=np.int64).reshape(rows, cols), maxval + 1


def result_raster(result: RunResult) -> str:
    g = result.world.grid
    return render_pgm(np.asarray(result.classes).reshape(g.rows, g.cols), result.n_classes)


def write_result(result: RunResult) -> tuple[str, str]:
    """Class CSV and PGM raster for a run."""
    return write_classes(result.world, result.classes), result_raster(result)


def summary_dict(result: RunResult) -> dict:
    return {
        "n_classes": result.n_classes,
        "class_counts": list(result.class_counts),
        "hotspots": [
            {"cell_id": h.cell_id, "vector": list(h.vector), "class": h.klass} for h in result.hotspots
        ],
        "config": result.config.to_dict(),
    }


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def comparison_dict(cmp: RunComparison) -> dict:
    return {
        "upgraded": cmp.upgraded,
        "downgraded": cmp.downgraded,
        "unchanged": cmp.unchanged,
        "zones": {
            zone: {"cells": z.cells, "upgraded": z.upgraded, "downgraded": z.downgraded, "net": z.net}
            for zone, z in cmp.zones.items()
        },
    }


def to_geojson(world: World, classes: Sequence[int]) -> dict:
    """Point features at cell centers carrying the intensity class."""
    features = []
    for cell in sorted(range(world.size), key=lambda i: world.cell_ids[i]):
        lat, lon = world.grid.center(cell)
        features.append({
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": [lon, lat]},
            "properties": {
                "cell_id": world.cell_ids[cell],
                "owner": world.owners[cell] or INTERNATIONAL,
                "class": int(classes[cell]),
            },
        })
    return {"type": "FeatureCollection", "features": features}
