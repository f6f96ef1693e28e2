"""Command-line interface.

Exit status: 0 on success, 1 on validation or usage errors, 2 on I/O errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import yaml

from . import io as cio
from .scenario import (
    ConfigError,
    compare_classes,
    compare_runs,
    config_from_mapping,
    defaulted_importance,
    eez_share,
    run_scenario,
    sweep_alpha,
)
from .utility import RESOURCES
from .world import WorldError

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _add_inputs(p: argparse.ArgumentParser, layers: bool = True) -> None:
    p.add_argument("--config", type=Path, help="scenario config (YAML); may list input files under 'inputs'")
    p.add_argument("--world", type=Path, help="world CSV (cell_id,row,col,lat,lon,owner)")
    p.add_argument("--countries", type=Path, help="countries CSV (code,kind,anchor_lat,anchor_lon)")
    if layers:
        for r in RESOURCES:
            p.add_argument(f"--{r.value}", type=Path, help=f"{r.value} layer CSV")
        p.add_argument("--alpha", type=float, help="uniform alpha for all unpinned (country, resource) pairs")
        p.add_argument("--grades", type=int, help="grade scale size")
        p.add_argument("--top-k", type=int, help="number of hotspot cells to report")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="conflictzones", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="check world, layers and config; list defaulted values")
    _add_inputs(p)

    p = sub.add_parser("run", help="run one scenario")
    _add_inputs(p)
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.add_argument("--geojson", action="store_true", help="also write classes.geojson")

    p = sub.add_parser("sweep", help="run the scenario for several alpha values")
    _add_inputs(p)
    p.add_argument("--alphas", required=True, help="comma-separated alpha values, e.g. 0.1,0.8")
    p.add_argument("--out", type=Path, required=True, help="output directory")

    p = sub.add_parser("compare", help="class changes between two class CSVs")
    _add_inputs(p, layers=False)
    p.add_argument("before", type=Path)
    p.add_argument("after", type=Path)
    p.add_argument("--perspective", help="country code for own/foreign EEZ breakdown")
    p.add_argument("--out", type=Path, help="write the JSON report here instead of stdout")

    p = sub.add_parser("render", help="render a class CSV as a PGM raster")
    p.add_argument("classes", type=Path)
    p.add_argument("--n-classes", type=int, default=6)
    p.add_argument("--out", type=Path, required=True)
    return parser


def _read(path: Path) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _load_config(args) -> tuple[dict, Path]:
    if args.config is None:
        return {}, Path.cwd()
    raw = yaml.safe_load(_read(args.config)) or {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{args.config}: config must be a mapping")
    return raw, args.config.parent


def _input_path(args, raw: dict, base: Path, name: str) -> Path | None:
    flag = getattr(args, name, None)
    if flag is not None:
        return flag
    listed = (raw.get("inputs") or {}).get(name)
    return None if listed is None else base / listed


def _load_world(args, raw, base):
    world_path = _input_path(args, raw, base, "world")
    countries_path = _input_path(args, raw, base, "countries")
    if world_path is None or countries_path is None:
        raise ConfigError("both a world file and a countries file are required (--world, --countries)")
    countries = cio.parse_countries(_read(countries_path), str(countries_path))
    return cio.parse_world(_read(world_path), countries, str(world_path))


def _load_all(args):
    raw, base = _load_config(args)
    if args.alpha is not None:
        raw["alpha"] = {**_as_pair(raw.get("alpha")), "default": args.alpha}
    if args.grades is not None:
        raw["grades"] = args.grades
    if args.top_k is not None:
        raw["top_k"] = args.top_k
    config, defaulted = config_from_mapping(raw)
    world = _load_world(args, raw, base)
    layers = {}
    for r in RESOURCES:
        path = _input_path(args, raw, base, r.value)
        if path is None:
            raise ConfigError(f"missing {r.value} layer (--{r.value} or inputs.{r.value})")
        layers[r] = cio.parse_layer(_read(path), world, r, str(path))
    defaulted += defaulted_importance(config, world)
    return world, layers, config, defaulted


def _as_pair(value) -> dict:
    if value is None:
        return {}
    if isinstance(value, dict):
        return dict(value)
    return {"default": value}


def _write_run(result, out: Path, geojson: bool = False) -> None:
    classes_csv, raster = cio.write_result(result)
    _write(out / "classes.csv", classes_csv)
    _write(out / "classes.pgm", raster)
    _write(out / "forecasts.csv", cio.write_forecasts(result))
    _write(out / "summary.json", cio.dumps(cio.summary_dict(result)))
    if geojson:
        _write(out / "classes.geojson", cio.dumps(cio.to_geojson(result.world, result.classes)))


def _cmd_validate(args) -> int:
    world, layers, config, defaulted = _load_all(args)
    owned = sum(o is not None for o in world.owners)
    print(f"world: {world.grid.rows}x{world.grid.cols} cells, {len(world.countries)} countries, "
          f"{owned} EEZ cells, {world.size - owned} international")
    for r in RESOURCES:
        print(f"layer {r.value}: {int((layers[r].values > 0).sum())} nonzero cells")
    # Distance fields fail here if a country has neither cells nor an anchor.
    run_scenario(world, layers, config)
    if defaulted:
        print("defaulted values:")
        for line in defaulted:
            print(f"  {line}")
    print("ok")
    return EXIT_OK


def _cmd_run(args) -> int:
    world, layers, config, _ = _load_all(args)
    result = run_scenario(world, layers, config)
    _write_run(result, args.out, args.geojson)
    print(f"class counts: {result.class_counts}")
    print(f"wrote {args.out}")
    return EXIT_OK


def _parse_alphas(text: str) -> list[float]:
    try:
        alphas = [float(a) for a in text.split(",") if a.strip()]
    except ValueError:
        raise ConfigError(f"--alphas must be comma-separated numbers, got {text!r}") from None
    if not alphas:
        raise ConfigError("--alphas is empty")
    return alphas


def _cmd_sweep(args) -> int:
    alphas = _parse_alphas(args.alphas)
    world, layers, config, _ = _load_all(args)
    runs = sweep_alpha(world, layers, config, alphas)
    summary = {"alphas": [], "comparisons": []}
    for alpha, result in runs:
        _write_run(result, args.out / f"alpha_{alpha:g}")
        summary["alphas"].append({
            "alpha": alpha,
            "class_counts": result.class_counts,
            "top_class": result.top_class(),
            "top_class_eez_share": eez_share(world, result.top_cells()),
        })
    base_alpha, base = runs[0]
    for alpha, result in runs[1:]:
        entry = cio.comparison_dict(compare_runs(base, result))
        summary["comparisons"].append({"from": base_alpha, "to": alpha, **entry})
    _write(args.out / "sweep_summary.json", cio.dumps(summary))
    for row in summary["alphas"]:
        print(f"alpha={row['alpha']:g} counts={row['class_counts']} "
              f"top-class EEZ share={row['top_class_eez_share']:.3f}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    raw, base = _load_config(args)
    world = _load_world(args, raw, base)
    before = cio.classes_for_world(cio.parse_classes(_read(args.before), str(args.before)), world, str(args.before))
    after = cio.classes_for_world(cio.parse_classes(_read(args.after), str(args.after)), world, str(args.after))
    report = cio.dumps(cio.comparison_dict(compare_classes(world, before, after, args.perspective)))
    if args.out:
        _write(args.out, report)
    else:
        sys.stdout.write(report)
    return EXIT_OK


def _cmd_render(args) -> int:
    table = cio.parse_classes(_read(args.classes), str(args.classes))
    _write(args.out, cio.render_pgm(table.grid_array("class"), args.n_classes))
    return EXIT_OK


COMMANDS = {
    "validate": _cmd_validate,
    "run": _cmd_run,
    "sweep": _cmd_sweep,
    "compare": _cmd_compare,
    "render": _cmd_render,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, WorldError, cio.ParseError, ValueError, yaml.YAMLError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
