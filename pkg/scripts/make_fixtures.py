#!/usr/bin/env python3
"""Regenerate the bundled synthetic data sets under src/conflictzones/data/."""

import argparse
from pathlib import Path

import yaml

from conflictzones import fixtures
from conflictzones import io as cio
from conflictzones.utility import RESOURCES

DATA = Path(__file__).resolve().parents[1] / "src" / "conflictzones" / "data"

SETS = {
    "arctic": (fixtures.arctic_world, fixtures.arctic_layers, fixtures.ARCTIC_IMPORTANCE),
    "dual_zone": (fixtures.dual_zone_world, fixtures.dual_zone_layers, {}),
}


def write_set(name, out):
    make_world, make_layers, importance = SETS[name]
    world = make_world()
    layers = make_layers(world)
    out.mkdir(parents=True, exist_ok=True)
    (out / "countries.csv").write_text(cio.write_countries(world.countries))
    (out / "world.csv").write_text(cio.write_world(world))
    for r in RESOURCES:
        (out / f"{r.value}.csv").write_text(cio.write_layer(layers[r], world))
    config = {
        "grades": 6,
        "quantize": "linear",
        "alpha": 0.5,
        "decay_km": 1000.0,
        "maritime": {"a": 1.0, "decay_km": 1000.0, "importance": importance, "default_importance": 1.0},
        "step1_weights": 1.0,
        "step2_weights": {r.value: 1.0 for r in RESOURCES},
        "overall_threshold": {"mode": "quantile", "classes": 6},
        "top_k": 10,
        "inputs": {
            "world": "world.csv",
            "countries": "countries.csv",
            **{r.value: f"{r.value}.csv" for r in RESOURCES},
        },
    }
    (out / "scenario.yaml").write_text(yaml.safe_dump(config, sort_keys=False))
    print(f"wrote {out}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=DATA)
    args = parser.parse_args()
    for name in SETS:
        write_set(name, args.out / name)


if __name__ == "__main__":
    main()
