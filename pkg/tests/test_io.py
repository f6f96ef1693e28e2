import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conflictzones import io as cio
from conflictzones.scenario import run_scenario
from conflictzones.utility import RESOURCES, Resource, ResourceLayer

from conftest import small_layers, small_world

COUNTRIES = "code,kind,anchor_lat,anchor_lon\nRU,Arctic,,\nJP,NonArctic,35.0,139.0\n"
WORLD4 = (
    "cell_id,row,col,lat,lon,owner\n"
    "a,0,0,67.0,10.0,RU\n"
    "b,0,1,67.0,20.0,INTL\n"
    "c,1,0,69.0,10.0,INTL\n"
    "d,1,1,69.0,20.0,INTL\n"
)


def countries():
    return cio.parse_countries(COUNTRIES)


def test_header_only_world():
    with pytest.raises(cio.ParseError, match="no cells"):
        cio.parse_world("cell_id,row,col,lat,lon,owner\n", countries())


def test_minimal_world():
    world = cio.parse_world(WORLD4, countries())
    assert (world.grid.rows, world.grid.cols) == (2, 2)
    assert world.owners == ("RU", None, None, None)
    assert world.cell_ids == ("a", "b", "c", "d")


def test_malformed_row_named():
    bad = WORLD4.replace("c,1,0,69.0,10.0,INTL", "c,1,0,sixty-nine,10.0,INTL")
    with pytest.raises(cio.ParseError) as err:
        cio.parse_world(bad, countries(), source="w.csv")
    assert err.value.line == 4 and err.value.column == "lat"
    assert "w.csv, line 4, field 'lat'" in str(err.value)


@pytest.mark.parametrize("bad, column", [
    (WORLD4.replace("d,1,1", "a,1,1"), "cell_id"),
    (WORLD4.replace("RU\n", "XX\n"), "owner"),
])
def test_world_errors(bad, column):
    with pytest.raises(cio.ParseError) as err:
        cio.parse_world(bad, countries())
    assert err.value.column == column


def test_world_missing_position():
    text = "\n".join(WORLD4.splitlines()[:-1]) + "\n"
    with pytest.raises(cio.ParseError, match="missing"):
        cio.parse_world(text, countries())


def test_world_wrong_header():
    with pytest.raises(cio.ParseError, match="header"):
        cio.parse_world("id,row,col\n", countries())


def test_countries_errors():
    with pytest.raises(cio.ParseError, match="kind"):
        cio.parse_countries("code,kind\nRU,Polar\n")
    with pytest.raises(cio.ParseError, match="duplicate"):
        cio.parse_countries("code,kind\nRU,Arctic\nRU,Arctic\n")


def test_empty_layer_body():
    world = cio.parse_world(WORLD4, countries())
    layer = cio.parse_layer("cell_id,resource,value\n", world, "gas")
    assert layer.resource is Resource.GAS
    assert not layer.values.any()


def test_single_layer_row():
    world = cio.parse_world(WORLD4, countries())
    layer = cio.parse_layer("cell_id,resource,value\nc,gas,12.5\n", world)
    assert layer.values.tolist() == [0.0, 0.0, 12.5, 0.0]


@pytest.mark.parametrize("row, column", [
    ("c,gas,-1", "value"),
    ("zz,gas,1", "cell_id"),
    ("c,coal,1", "resource"),
    ("c,oil,1", "resource"),
    ("c,gas,abc", "value"),
])
def test_layer_errors(row, column):
    world = cio.parse_world(WORLD4, countries())
    with pytest.raises(cio.ParseError) as err:
        cio.parse_layer(f"cell_id,resource,value\n{row}\n", world, "gas", source="gas.csv")
    assert err.value.line == 2 and err.value.column == column


def test_pgm_single_cell():
    assert cio.render_pgm(np.array([[3]]), 6) == "P2\n1 1\n5\n3\n"


def test_pgm_all_zero():
    text = cio.render_pgm(np.zeros((2, 3), dtype=int), 6)
    grid, n = cio.parse_pgm(text)
    assert n == 6 and not grid.any() and grid.shape == (2, 3)


def test_pgm_rejects_out_of_range():
    with pytest.raises(ValueError):
        cio.render_pgm(np.array([[6]]), 6)


def test_world_and_countries_round_trip(arctic):
    world, _ = arctic
    again = cio.parse_world(cio.write_world(world), cio.parse_countries(cio.write_countries(world.countries)))
    assert again == world


def test_layer_round_trip_with_routes(arctic):
    world, layers = arctic
    for r in RESOURCES:
        again = cio.parse_layer(cio.write_layer(layers[r], world), world, r)
        np.testing.assert_array_equal(again.values, layers[r].values)
        assert again.route_ids == layers[r].route_ids


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0, 1e12, allow_nan=False), min_size=9, max_size=9))
def test_layer_round_trip_property(values):
    world = small_world()
    layer = ResourceLayer(Resource.OIL, values)
    again = cio.parse_layer(cio.write_layer(layer, world), world, Resource.OIL)
    np.testing.assert_array_equal(again.values, layer.values)


def test_result_round_trip(arctic, arctic_config):
    world, layers = arctic
    result = run_scenario(world, layers, arctic_config)
    csv_text, pgm = cio.write_result(result)
    table = cio.parse_classes(csv_text)
    np.testing.assert_array_equal(cio.classes_for_world(table, world), result.classes)
    grid, n = cio.parse_pgm(pgm)
    assert n == result.n_classes
    np.testing.assert_array_equal(grid.ravel(), result.classes)
    np.testing.assert_array_equal(table.grid_array("class").ravel(), result.classes)
    fc = cio.parse_forecasts(cio.write_forecasts(result))
    for r in RESOURCES:
        np.testing.assert_array_equal(fc.grid_array(r.value).ravel(), result.forecasts[r].grades)
    assert cio.write_classes(world, cio.classes_for_world(table, world)) == csv_text


def test_writers_are_deterministic():
    world = small_world()
    a = run_scenario(world, small_layers(world), _cfg())
    b = run_scenario(world, small_layers(world), _cfg())
    assert cio.write_result(a) == cio.write_result(b)
    assert cio.write_forecasts(a) == cio.write_forecasts(b)


def test_geojson(arctic, arctic_config):
    world, layers = arctic
    result = run_scenario(world, layers, arctic_config)
    gj = cio.to_geojson(world, result.classes)
    assert len(gj["features"]) == world.size
    first = gj["features"][0]
    assert first["geometry"]["coordinates"] == [world.grid.lons[0], world.grid.lats[0]]


def _cfg():
    from conflictzones.scenario import ScenarioConfig

    return ScenarioConfig(importance={"JP": 0.5})
