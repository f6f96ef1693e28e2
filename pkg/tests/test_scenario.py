import dataclasses

import numpy as np
import pytest

from conflictzones import fixtures
from conflictzones.aggregation import Quantile, ReferenceVectors
from conflictzones.scenario import (
    ConfigError,
    PairParam,
    ScenarioConfig,
    compare_classes,
    compare_runs,
    config_from_mapping,
    eez_share,
    run_scenario,
    sweep_alpha,
)
from conflictzones.utility import RESOURCES, QuantizeMode, Resource, ResourceLayer
from conflictzones.world import distance_fields

import oracle
from conftest import small_layers, small_world

ALPHAS = (0.0, 0.25, 0.5, 0.75, 1.0)


def zero_layers(world):
    return {r: ResourceLayer.zeros(r, world.size) for r in RESOURCES}


def config(**kw):
    base = dict(importance={"JP": 0.8})
    base.update(kw)
    return ScenarioConfig(**base)


def test_pair_param_lookup():
    p = PairParam(0.5, {Resource.GAS: 0.2}, {"RU": {Resource.GAS: 0.9, Resource.OIL: 0.1}})
    assert p.get("NO", Resource.OIL) == 0.5
    assert p.get("NO", Resource.GAS) == 0.2
    assert p.get("RU", Resource.GAS) == 0.9
    assert p.get("RU", Resource.FISH) == 0.5


def test_config_defaults_reported():
    cfg, defaulted = config_from_mapping({})
    assert cfg == ScenarioConfig()
    text = "\n".join(defaulted)
    for key in ("grades", "alpha.default", "decay_km.default", "maritime.a", "step2_weights.oil", "top_k"):
        assert key in text


def test_config_parsing_full():
    cfg, defaulted = config_from_mapping({
        "grades": 5,
        "quantize": "quantile",
        "alpha": {"default": 0.3, "by_resource": {"fish": 0.1}, "by_country": {"RU": {"gas": 0.9}}},
        "maritime": {"a": 2.0, "decay_km": 500, "importance": {"CN": 0.5}, "default_importance": 0.9},
        "step2_weights": {"oil": 2, "gas": 1, "fish": 1, "maritime": 1},
        "forecast_threshold": {"mode": "quantile", "classes": 5},
        "overall_threshold": {"mode": "reference", "boundaries": [[1, 0, 0, 0], [3, 1, 0, 0]]},
        "top_k": 3,
    })
    assert cfg.grades == 5 and cfg.quantize_mode is QuantizeMode.QUANTILE
    assert cfg.alpha.get("RU", Resource.GAS) == 0.9
    assert cfg.alpha.get("RU", Resource.FISH) == 0.1
    assert cfg.overall_scheme == ReferenceVectors(((1, 0, 0, 0), (3, 1, 0, 0)))
    assert cfg.step2_weights[Resource.OIL] == 2.0
    assert not any(d.startswith("alpha") for d in defaulted)


@pytest.mark.parametrize("raw", [
    {"alpha": 1.5},
    {"alpha": {"by_country": {"RU": {"gas": -0.1}}}},
    {"step2_weights": {"oil": 0}},
    {"maritime": {"importance": {"CN": 1.5}}},
    {"grades": 1},
    {"forecast_threshold": {"mode": "quantile", "classes": 4}},
    {"overall_threshold": {"mode": "bogus"}},
    {"alpha": {"by_resource": {"coal": 0.5}}},
    {"unknown_key": 1},
])
def test_config_rejects_invalid(raw):
    with pytest.raises(ConfigError):
        config_from_mapping(raw)


def test_zero_world():
    world = small_world()
    result = run_scenario(world, zero_layers(world), config())
    assert not result.classes.any()
    assert result.hotspots == []
    assert sum(result.class_counts) == world.size


def test_point_source():
    world = small_world()
    layers = zero_layers(world)
    gas = np.zeros(world.size)
    gas[4] = 3.0
    layers[Resource.GAS] = ResourceLayer(Resource.GAS, gas)
    result = run_scenario(world, layers, config())
    assert result.classes[4] == result.classes.max()
    assert (result.classes == result.classes.max()).sum() == 1
    assert [h.cell for h in result.hotspots] == [4]


def test_missing_layer():
    world = small_world()
    layers = zero_layers(world)
    del layers[Resource.FISH]
    with pytest.raises(ConfigError, match="fish"):
        run_scenario(world, layers, config())


def test_reproducible(arctic, arctic_config):
    world, layers = arctic
    a = run_scenario(world, layers, arctic_config)
    b = run_scenario(world, layers, arctic_config)
    np.testing.assert_array_equal(a.classes, b.classes)
    assert a.hotspots == b.hotspots
    for r in RESOURCES:
        np.testing.assert_array_equal(a.forecasts[r].grades, b.forecasts[r].grades)


def test_class_counts_sum(arctic, arctic_config):
    world, layers = arctic
    result = run_scenario(world, layers, arctic_config)
    assert sum(result.class_counts) == world.size
    assert len(result.class_counts) == result.n_classes


def test_hotspots_include_ties(arctic, arctic_config):
    world, layers = arctic
    result = run_scenario(world, layers, dataclasses.replace(arctic_config, top_k=1))
    top_level = result.overall.ranking.level.max()
    expected = np.flatnonzero(result.overall.ranking.level == top_level)
    assert sorted(h.cell for h in result.hotspots) == expected.tolist()


@pytest.mark.parametrize("quantize_mode", ["linear", "quantile"])
def test_small_pipeline_matches_oracle(quantize_mode):
    world = small_world()
    layers = small_layers(world)
    cfg = config(quantize_mode=quantize_mode, alpha=PairParam(0.4))
    result = run_scenario(world, layers, cfg)
    grades, forecasts, classes = oracle.pipeline(world, layers, cfg)
    for key, g in grades.items():
        assert result.grades[key].grades.tolist() == g, key
    for r in RESOURCES:
        assert result.forecasts[r].grades.tolist() == forecasts[r]
    assert result.classes.tolist() == classes


def test_weighted_pipeline_matches_oracle(dual_zone):
    world, layers = dual_zone
    cfg, _ = config_from_mapping({"step2_weights": {"oil": 2.0, "gas": 0.5}, "alpha": 0.3})
    result = run_scenario(world, layers, cfg)
    _, _, classes = oracle.pipeline(world, layers, cfg)
    assert result.classes.tolist() == classes


def test_resource_normalization_makes_weights_count(dual_zone):
    world, layers = dual_zone
    base, _ = config_from_mapping({"normalization": "resource"})
    heavy = dataclasses.replace(base, step1_weights=PairParam(1.0, by_country={"XX": {Resource.OIL: 3.0}}))
    g0 = run_scenario(world, layers, base).grades["XX", Resource.OIL].grades
    g1 = run_scenario(world, layers, heavy).grades["XX", Resource.OIL].grades
    assert np.all(g1 >= g0) and np.any(g1 > g0)


def test_zero_alpha_isolation(arctic, arctic_config):
    world, layers = arctic
    result = run_scenario(world, layers, arctic_config.with_alpha(0.0))
    for (code, _), g in result.grades.items():
        assert not g.grades[world.foreign_mask(code)].any()


def test_one_alpha_equivalence(arctic, arctic_config):
    world, layers = arctic
    cfg = arctic_config.with_alpha(1.0)
    a = run_scenario(world, layers, cfg)
    b = run_scenario(world.relabeled_international(), layers, cfg, distance_fields(world))
    np.testing.assert_array_equal(a.classes, b.classes)


def test_sweep_respects_pins(arctic, arctic_config):
    world, layers = arctic
    cfg = dataclasses.replace(arctic_config, alpha=PairParam(0.5, by_country={"RU": {Resource.GAS: 0.2}}))
    runs = sweep_alpha(world, layers, cfg, [0.0, 1.0])
    for alpha, result in runs:
        assert result.config.alpha.get("RU", Resource.GAS) == 0.2
        assert result.config.alpha.get("NO", Resource.GAS) == alpha


def test_sweep_rejects_out_of_range(arctic, arctic_config):
    world, layers = arctic
    with pytest.raises(ConfigError):
        sweep_alpha(world, layers, arctic_config, [0.5, 1.2])


def test_sweep_endpoints(arctic, arctic_config):
    world, layers = arctic
    (_, zero), (_, one) = sweep_alpha(world, layers, arctic_config, [0.0, 1.0])
    for (code, _), g in zero.grades.items():
        assert not g.grades[world.foreign_mask(code)].any()
    relabeled = run_scenario(world.relabeled_international(), layers, arctic_config, distance_fields(world))
    for key, u in one.utilities.items():
        np.testing.assert_array_equal(u.values, relabeled.utilities[key].values)


def test_shift_low_vs_high(dual_zone):
    world, layers = dual_zone
    cfg, _ = config_from_mapping({})
    (_, low), (_, high) = sweep_alpha(world, layers, cfg, [0.1, 0.8])
    assert eez_share(world, high.top_cells()) >= eez_share(world, low.top_cells())


def test_barents_cell_is_top(arctic, arctic_config):
    world, layers = arctic
    cell = fixtures.barents_cell(world)
    assert world.owners[cell] is None
    for _, result in sweep_alpha(world, layers, arctic_config, ALPHAS):
        assert result.classes[cell] == result.top_class()


def test_compare_identity(arctic, arctic_config):
    world, layers = arctic
    r = run_scenario(world, layers, arctic_config)
    cmp = compare_runs(r, r)
    assert not cmp.delta.any()
    assert cmp.unchanged == world.size


def test_compare_unit_upgrade():
    world = small_world()
    before = np.zeros(9, dtype=int)
    after = before.copy()
    after[4] = 1
    cmp = compare_classes(world, before, after)
    assert cmp.delta.tolist() == after.tolist()
    assert cmp.upgraded == 1 and cmp.downgraded == 0
    assert cmp.zones["international"].upgraded == 1
    assert set(cmp.zones) == {"international", "eez:RU", "eez:NO"}


def test_compare_perspective_zones():
    world = small_world()
    before = np.zeros(9, dtype=int)
    after = np.array([1, 0, 2, 0, 0, 0, 0, 0, 0])
    cmp = compare_classes(world, before, after, perspective="RU")
    assert cmp.zones["own_eez"].net == 1
    assert cmp.zones["foreign_eez"].net == 2
    assert cmp.zones["international"].net == 0


def test_compare_grid_mismatch(arctic, arctic_config):
    world, layers = arctic
    r = run_scenario(world, layers, arctic_config)
    small = run_scenario(small_world(), zero_layers(small_world()), config())
    with pytest.raises(ValueError):
        compare_runs(r, small)


def test_low_high_breakdown_golden(arctic, arctic_config):
    world, layers = arctic
    (_, low), (_, high) = sweep_alpha(world, layers, arctic_config, [0.1, 0.8])
    cmp = compare_runs(low, high)
    # consistency of the breakdown with the delta field
    assert sum(z.cells for z in cmp.zones.values()) == world.size
    assert sum(z.net for z in cmp.zones.values()) == int(cmp.delta.sum())
    assert cmp.upgraded + cmp.downgraded + cmp.unchanged == world.size
