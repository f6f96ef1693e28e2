#!/usr/bin/env python3
"""Alpha sweep and low/high mutual-interest scenarios on a bundled data set.

Prints, per scenario, the class histogram, the share of top-class cells inside
EEZs and the class of the contested Barents-style cell. With --out, writes one
PGM raster per scenario.
"""

import argparse
import dataclasses
from pathlib import Path

import yaml

from conflictzones import fixtures
from conflictzones import io as cio
from conflictzones.scenario import config_from_mapping, eez_share, sweep_alpha
from conflictzones.utility import RESOURCES

DATA = Path(__file__).resolve().parents[1] / "src" / "conflictzones" / "data"

# Non-Arctic importance in the two mutual-interest scenarios.
LOW_IMPORTANCE, HIGH_IMPORTANCE = 0.3, 1.0


def load(name):
    d = DATA / name
    countries = cio.parse_countries((d / "countries.csv").read_text())
    world = cio.parse_world((d / "world.csv").read_text(), countries)
    layers = {r: cio.parse_layer((d / f"{r.value}.csv").read_text(), world, r) for r in RESOURCES}
    config, _ = config_from_mapping(yaml.safe_load((d / "scenario.yaml").read_text()))
    return world, layers, config


def report(label, world, result, out):
    hot = fixtures.barents_cell(world) if world.size == fixtures.ROWS * fixtures.COLS else None
    line = (f"{label:<14} counts={result.class_counts} "
            f"top-class EEZ share={eez_share(world, result.top_cells()):.3f}")
    if hot is not None:
        line += f" barents class={int(result.classes[hot])}/{result.top_class()}"
    print(line)
    if out:
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{label.replace('=', '_')}.pgm").write_text(cio.result_raster(result))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--data", default="arctic", choices=["arctic", "dual_zone"])
    parser.add_argument("--alphas", default="0,0.25,0.5,0.75,1")
    parser.add_argument("--out", type=Path)
    args = parser.parse_args()

    world, layers, config = load(args.data)
    alphas = [float(a) for a in args.alphas.split(",")]
    print(f"# alpha sweep on {args.data}")
    for alpha, result in sweep_alpha(world, layers, config, alphas):
        report(f"alpha={alpha:g}", world, result, args.out)

    print("# mutual-interest scenarios")
    non_arctic = [c.code for c in world.countries if not c.is_arctic]
    for label, alpha, imp in (("low", 0.1, LOW_IMPORTANCE), ("high", 0.8, HIGH_IMPORTANCE)):
        # Per-field grading rescales a constant importance away; a shared scale keeps it visible.
        cfg = dataclasses.replace(config, importance={c: imp for c in non_arctic}, normalization="resource")
        (_, result), = sweep_alpha(world, layers, cfg, [alpha])
        report(label, world, result, args.out)


if __name__ == "__main__":
    main()
