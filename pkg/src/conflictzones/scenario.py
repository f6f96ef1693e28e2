"""Scenario configuration, full pipeline runs, alpha sweeps and run comparison."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .aggregation import (
    ConflictClassField,
    Quantile,
    ReferenceVectors,
    ThresholdScheme,
    aggregate_overall,
    aggregate_resource,
)
from .utility import (
    DEFAULT_DECAY_KM,
    DEFAULT_GRADES,
    DEPOSIT_RESOURCES,
    RESOURCES,
    DecayFunction,
    GradeField,
    MaritimeParams,
    QuantizeMode,
    Resource,
    ResourceLayer,
    UtilityField,
    deposit_utility,
    maritime_utility,
    quantize,
)
from .world import DistanceField, World, distance_fields

DEFAULT_ALPHA = 0.5
DEFAULT_TOP_K = 10


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class PairParam:
    """A value per (country, resource) pair with resource- and pair-level overrides.

    Lookup order: ``by_country[code][resource]``, then ``by_resource[resource]``,
    then ``default``.
    """

    default: float
    by_resource: Mapping[Resource, float] = field(default_factory=dict)
    by_country: Mapping[str, Mapping[Resource, float]] = field(default_factory=dict)

    def get(self, country: str, resource: Resource) -> float:
        pinned = self.by_country.get(country, {})
        if resource in pinned:
            return pinned[resource]
        return self.by_resource.get(resource, self.default)

    def values(self) -> Iterable[float]:
        yield self.default
        yield from self.by_resource.values()
        for per in self.by_country.values():
            yield from per.values()

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"default": self.default}
        if self.by_resource:
            out["by_resource"] = {r.value: v for r, v in self.by_resource.items()}
        if self.by_country:
            out["by_country"] = {
                c: {r.value: v for r, v in per.items()} for c, per in self.by_country.items()
            }
        return out


@dataclass(frozen=True)
class ScenarioConfig:
    grades: int = DEFAULT_GRADES
    quantize_mode: QuantizeMode = QuantizeMode.LINEAR
    # "field": each utility field is graded against its own maximum.
    # "resource": all countries' fields of one resource share the largest unweighted maximum.
    normalization: str = "field"
    alpha: PairParam = PairParam(DEFAULT_ALPHA)
    decay_km: PairParam = PairParam(DEFAULT_DECAY_KM)
    maritime_a: float = 1.0
    maritime_decay_km: float = DEFAULT_DECAY_KM
    importance: Mapping[str, float] = field(default_factory=dict)
    default_importance: float = 1.0
    step1_weights: PairParam = PairParam(1.0)
    step2_weights: Mapping[Resource, float] = field(default_factory=dict)
    forecast_scheme: ThresholdScheme | None = None
    overall_scheme: ThresholdScheme = Quantile(6)
    top_k: int = DEFAULT_TOP_K

    def __post_init__(self):
        object.__setattr__(self, "quantize_mode", QuantizeMode(self.quantize_mode))
        if self.grades < 2:
            raise ConfigError(f"grades must be at least 2, got {self.grades}")
        if self.normalization not in ("field", "resource"):
            raise ConfigError(f"normalization must be 'field' or 'resource', got {self.normalization!r}")
        for a in self.alpha.values():
            if not 0 <= a <= 1:
                raise ConfigError(f"alpha values must lie in [0, 1], got {a}")
        for d in self.decay_km.values():
            if not d > 0:
                raise ConfigError(f"decay scales must be positive, got {d}")
        for w in list(self.step1_weights.values()) + list(self.step2_weights.values()):
            if not w > 0:
                raise ConfigError(f"weights must be positive, got {w}")
        for code, imp in {**self.importance, "(default)": self.default_importance}.items():
            if not 0 < imp <= 1:
                raise ConfigError(f"importance of {code} must lie in (0, 1], got {imp}")
        if not self.maritime_a > 0 or not self.maritime_decay_km > 0:
            raise ConfigError("maritime base utility and decay scale must be positive")
        if self.forecast_scheme is not None and self.forecast_scheme.classes != self.grades:
            raise ConfigError(
                f"forecast scheme has {self.forecast_scheme.classes} classes, grade scale has {self.grades}"
            )
        if self.top_k < 1:
            raise ConfigError("top_k must be positive")

    def with_alpha(self, alpha: float) -> "ScenarioConfig":
        """Uniform alpha for every pair not explicitly pinned by country."""
        return dataclasses.replace(
            self, alpha=PairParam(alpha, self.alpha.by_resource, self.alpha.by_country)
        )

    def maritime_params(self, world: World) -> MaritimeParams:
        importance = {
            c.code: self.importance.get(c.code, self.default_importance)
            for c in world.countries
            if not c.is_arctic
        }
        return MaritimeParams(self.maritime_a, DecayFunction(self.maritime_decay_km), importance)

    def to_dict(self) -> dict:
        return {
            "grades": self.grades,
            "quantize": self.quantize_mode.value,
            "normalization": self.normalization,
            "alpha": self.alpha.to_dict(),
            "decay_km": self.decay_km.to_dict(),
            "maritime": {
                "a": self.maritime_a,
                "decay_km": self.maritime_decay_km,
                "importance": dict(self.importance),
                "default_importance": self.default_importance,
            },
            "step1_weights": self.step1_weights.to_dict(),
            "step2_weights": {r.value: self.step2_weights.get(r, 1.0) for r in RESOURCES},
            "forecast_threshold": _scheme_to_dict(self.forecast_scheme or Quantile(self.grades)),
            "overall_threshold": _scheme_to_dict(self.overall_scheme),
            "top_k": self.top_k,
        }


def _scheme_to_dict(scheme: ThresholdScheme) -> dict:
    if isinstance(scheme, Quantile):
        return {"mode": "quantile", "classes": scheme.classes}
    return {"mode": "reference", "boundaries": [list(b) for b in scheme.boundaries]}


def _parse_scheme(raw: Any, where: str) -> ThresholdScheme:
    if not isinstance(raw, Mapping):
        raise ConfigError(f"{where} must be a mapping")
    mode = raw.get("mode", "quantile")
    try:
        if mode == "quantile":
            return Quantile(int(raw["classes"])) if "classes" in raw else Quantile()
        if mode == "reference":
            return ReferenceVectors(tuple(tuple(b) for b in raw["boundaries"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    raise ConfigError(f"{where}.mode must be 'quantile' or 'reference', got {mode!r}")


def _resource(key: str, where: str) -> Resource:
    try:
        return Resource(key)
    except ValueError:
        raise ConfigError(f"{where}: unknown resource {key!r}") from None


def _parse_pair(raw: Any, where: str, default: float, defaulted: list[str]) -> PairParam:
    if raw is None:
        defaulted.append(f"{where}.default = {default}")
        return PairParam(default)
    if isinstance(raw, (int, float)):
        return PairParam(float(raw))
    if not isinstance(raw, Mapping):
        raise ConfigError(f"{where} must be a number or a mapping")
    unknown = set(raw) - {"default", "by_resource", "by_country"}
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    if "default" not in raw:
        defaulted.append(f"{where}.default = {default}")
    by_resource = {
        _resource(k, where): float(v) for k, v in (raw.get("by_resource") or {}).items()
    }
    by_country = {
        str(code): {_resource(k, where): float(v) for k, v in per.items()}
        for code, per in (raw.get("by_country") or {}).items()
    }
    return PairParam(float(raw.get("default", default)), by_resource, by_country)


_TOP_KEYS = {
    "grades", "quantize", "normalization", "alpha", "decay_km", "maritime", "step1_weights",
    "step2_weights", "forecast_threshold", "overall_threshold", "top_k", "inputs",
}


def config_from_mapping(raw: Mapping[str, Any] | None) -> tuple[ScenarioConfig, list[str]]:
    """Build a config from a parsed document.

    Returns the config and a list describing every value that was defaulted.
    """
    raw = dict(raw or {})
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    defaulted: list[str] = []

    def scalar(key, default, cast):
        if key not in raw:
            defaulted.append(f"{key} = {default}")
            return default
        try:
            return cast(raw[key])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{key}: {exc}") from exc

    grades = scalar("grades", DEFAULT_GRADES, int)
    maritime = raw.get("maritime") or {}
    if "maritime" not in raw:
        defaulted.append("maritime = {}")
    m_a = maritime.get("a", 1.0)
    m_decay = maritime.get("decay_km", DEFAULT_DECAY_KM)
    m_default_imp = maritime.get("default_importance", 1.0)
    for key, val in (("a", m_a), ("decay_km", m_decay), ("default_importance", m_default_imp)):
        if key not in maritime:
            defaulted.append(f"maritime.{key} = {val}")
    step2_raw = raw.get("step2_weights") or {}
    step2 = {_resource(k, "step2_weights"): float(v) for k, v in step2_raw.items()}
    for r in RESOURCES:
        if r not in step2:
            defaulted.append(f"step2_weights.{r.value} = 1.0")
    forecast = raw.get("forecast_threshold")
    if forecast is None:
        defaulted.append(f"forecast_threshold = quantile with {grades} classes")
    overall = raw.get("overall_threshold")
    if overall is None:
        defaulted.append("overall_threshold = quantile with 6 classes")
    try:
        config = ScenarioConfig(
            grades=grades,
            quantize_mode=scalar("quantize", "linear", str),
            normalization=scalar("normalization", "field", str),
            alpha=_parse_pair(raw.get("alpha"), "alpha", DEFAULT_ALPHA, defaulted),
            decay_km=_parse_pair(raw.get("decay_km"), "decay_km", DEFAULT_DECAY_KM, defaulted),
            maritime_a=float(m_a),
            maritime_decay_km=float(m_decay),
            importance={str(k): float(v) for k, v in (maritime.get("importance") or {}).items()},
            default_importance=float(m_default_imp),
            step1_weights=_parse_pair(raw.get("step1_weights"), "step1_weights", 1.0, defaulted),
            step2_weights=step2,
            forecast_scheme=None if forecast is None else _parse_scheme(forecast, "forecast_threshold"),
            overall_scheme=Quantile() if overall is None else _parse_scheme(overall, "overall_threshold"),
            top_k=scalar("top_k", DEFAULT_TOP_K, int),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return config, defaulted


def defaulted_importance(config: ScenarioConfig, world: World) -> list[str]:
    return [
        f"maritime.importance.{c.code} = {config.default_importance}"
        for c in world.countries
        if not c.is_arctic and c.code not in config.importance
    ]


@dataclass(frozen=True)
class Hotspot:
    cell: int
    cell_id: str
    vector: tuple[int, ...]
    klass: int


@dataclass(frozen=True)
class RunResult:
    world: World
    config: ScenarioConfig
    utilities: Mapping[tuple[str, Resource], UtilityField]
    grades: Mapping[tuple[str, Resource], GradeField]
    forecasts: Mapping[Resource, GradeField]
    overall: ConflictClassField
    class_counts: list[int]
    hotspots: list[Hotspot]

    @property
    def classes(self) -> np.ndarray:
        return self.overall.classes

    @property
    def n_classes(self) -> int:
        return self.overall.n_classes

    def top_class(self) -> int:
        """Highest class that holds at least one cell."""
        return int(self.classes.max())

    def top_cells(self) -> np.ndarray:
        return np.flatnonzero(self.classes == self.top_class())


def _check_layers(world: World, layers: Mapping[Resource, ResourceLayer]) -> None:
    for r in RESOURCES:
        if r not in layers:
            raise ConfigError(f"missing {r.value} layer")
        if layers[r].resource is not r:
            raise ConfigError(f"layer supplied for {r.value} holds {layers[r].resource.value} data")
        if layers[r].values.size != world.size:
            raise ConfigError(f"{r.value} layer has {layers[r].values.size} cells, world has {world.size}")


def _hotspots(world: World, overall: ConflictClassField, k: int) -> list[Hotspot]:
    ranking = overall.ranking
    live = np.flatnonzero(ranking.vectors.any(axis=1))
    if live.size == 0:
        return []
    levels = np.sort(ranking.level[live])[::-1]
    cutoff = levels[min(k, levels.size) - 1]
    chosen = [c for c in live if ranking.level[c] >= cutoff]
    chosen.sort(key=lambda c: (-int(ranking.level[c]), world.cell_ids[c]))
    return [
        Hotspot(int(c), world.cell_ids[c], tuple(int(g) for g in ranking.vectors[c]), int(overall.classes[c]))
        for c in chosen
    ]


def run_scenario(
    world: World,
    layers: Mapping[Resource, ResourceLayer],
    config: ScenarioConfig,
    distances: Mapping[str, DistanceField] | None = None,
) -> RunResult:
    """Distances, utilities, grades, per-resource forecasts, overall classes.

    ``distances`` may be supplied to measure countries from a different
    territory than ``world``'s ownership, e.g. when the same countries are
    evaluated on a relabeled world.
    """
    _check_layers(world, layers)
    if distances is None:
        distances = distance_fields(world)
    params = config.maritime_params(world)
    utilities: dict[tuple[str, Resource], UtilityField] = {}
    for r in RESOURCES:
        for code in world.codes:
            alpha = config.alpha.get(code, r)
            if r in DEPOSIT_RESOURCES:
                g = DecayFunction(config.decay_km.get(code, r))
                u = deposit_utility(world, layers[r], code, g, alpha, distances[code])
            else:
                u = maritime_utility(world, layers[r], code, params, alpha, distances[code])
            utilities[code, r] = u

    grades: dict[tuple[str, Resource], GradeField] = {}
    forecasts: dict[Resource, GradeField] = {}
    for r in RESOURCES:
        shared = None
        if config.normalization == "resource":
            shared = max(float(utilities[code, r].values.max()) for code in world.codes)
        for code in world.codes:
            w = config.step1_weights.get(code, r)
            # Shared scale stays unweighted so a weight above 1 can lift grades toward the top.
            grades[code, r] = quantize(
                utilities[code, r], config.grades, config.quantize_mode, w, shared or None
            )
        forecasts[r] = aggregate_resource([grades[code, r] for code in world.codes], config.forecast_scheme)

    overall = aggregate_overall(forecasts, config.step2_weights, config.overall_scheme)
    return RunResult(
        world=world,
        config=config,
        utilities=utilities,
        grades=grades,
        forecasts=forecasts,
        overall=overall,
        class_counts=overall.counts(),
        hotspots=_hotspots(world, overall, config.top_k),
    )


def sweep_alpha(
    world: World,
    layers: Mapping[Resource, ResourceLayer],
    config: ScenarioConfig,
    alphas: Sequence[float],
) -> list[tuple[float, RunResult]]:
    for a in alphas:
        if not 0 <= a <= 1:
            raise ConfigError(f"alpha {a} outside [0, 1]")
    distances = distance_fields(world)
    return [(a, run_scenario(world, layers, config.with_alpha(a), distances)) for a in alphas]


def eez_share(world: World, cells: Iterable[int]) -> float:
    """Fraction of the given cells lying inside some EEZ (0 for no cells)."""
    cells = list(cells)
    if not cells:
        return 0.0
    return sum(world.owners[c] is not None for c in cells) / len(cells)


@dataclass(frozen=True)
class ZoneDelta:
    cells: int = 0
    upgraded: int = 0
    downgraded: int = 0
    net: int = 0


@dataclass(frozen=True)
class RunComparison:
    delta: np.ndarray
    upgraded: int
    downgraded: int
    unchanged: int
    zones: Mapping[str, ZoneDelta]


def _zone_of(owner: str | None, perspective: str | None) -> str:
    if owner is None:
        return "international"
    if perspective is None:
        return f"eez:{owner}"
    return "own_eez" if owner == perspective else "foreign_eez"


def compare_classes(
    world: World,
    before: np.ndarray,
    after: np.ndarray,
    perspective: str | None = None,
) -> RunComparison:
    """Per-cell class change ``after - before`` with a per-zone breakdown.

    Without a ``perspective`` country, zones are international waters and each
    owner's EEZ; with one, they are its own EEZ, foreign EEZs and international.
    """
    before = np.asarray(before, dtype=np.int64)
    after = np.asarray(after, dtype=np.int64)
    if before.shape != (world.size,) or after.shape != (world.size,):
        raise ValueError("class fields do not match the world grid")
    if perspective is not None:
        world.country(perspective)
    delta = after - before
    buckets: dict[str, list[int]] = {}
    for cell, owner in enumerate(world.owners):
        buckets.setdefault(_zone_of(owner, perspective), []).append(cell)
    zones = {}
    for zone in sorted(buckets):
        d = delta[buckets[zone]]
        zones[zone] = ZoneDelta(len(d), int((d > 0).sum()), int((d < 0).sum()), int(d.sum()))
    delta.setflags(write=False)
    return RunComparison(
        delta=delta,
        upgraded=int((delta > 0).sum()),
        downgraded=int((delta < 0).sum()),
        unchanged=int((delta == 0).sum()),
        zones=zones,
    )


def compare_runs(r1: RunResult, r2: RunResult, perspective: str | None = None) -> RunComparison:
    if r1.world.size != r2.world.size or r1.world.cell_ids != r2.world.cell_ids:
        raise ValueError("runs cover different grids")
    return compare_classes(r1.world, r1.classes, r2.classes, perspective)
