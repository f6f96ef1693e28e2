"""Per-country resource utilities and their discretization to the grade scale."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

import numpy as np

from .world import DistanceField, World, distance_field

DEFAULT_GRADES = 6
DEFAULT_DECAY_KM = 1000.0
_REL_EPS = 1e-9


class Resource(str, Enum):
    OIL = "oil"
    GAS = "gas"
    FISH = "fish"
    MARITIME = "maritime"


RESOURCES = tuple(Resource)
DEPOSIT_RESOURCES = (Resource.OIL, Resource.GAS, Resource.FISH)


class QuantizeMode(str, Enum):
    LINEAR = "linear"
    QUANTILE = "quantile"


def _frozen(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ResourceLayer:
    """Nonnegative per-cell magnitude of one resource.

    For the maritime layer a positive value marks a route cell; ``route_ids``
    optionally tags each route cell with the route it belongs to.
    """

    resource: Resource
    values: np.ndarray
    route_ids: tuple[str | None, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "resource", Resource(self.resource))
        values = _frozen(self.values, float)
        if values.ndim != 1:
            raise ValueError("layer values must be a flat per-cell array")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ValueError(f"{self.resource.value} layer has negative or non-finite values")
        object.__setattr__(self, "values", values)
        if self.route_ids is not None:
            if len(self.route_ids) != values.size:
                raise ValueError("route_ids length does not match layer size")
            object.__setattr__(self, "route_ids", tuple(self.route_ids))

    @classmethod
    def zeros(cls, resource, size):
        return cls(resource, np.zeros(size))


@dataclass(frozen=True)
class DecayFunction:
    """Inverse-linear distance decay ``1 + d / scale_km``."""

    scale_km: float = DEFAULT_DECAY_KM

    def __post_init__(self):
        if not self.scale_km > 0:
            raise ValueError(f"decay scale must be positive, got {self.scale_km}")

    def __call__(self, d):
        return 1.0 + np.asarray(d, dtype=float) / self.scale_km


@dataclass(frozen=True)
class MaritimeParams:
    a: float = 1.0
    h: DecayFunction = field(default_factory=DecayFunction)
    importance: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"maritime base utility must be positive, got {self.a}")
        for code, imp in self.importance.items():
            if not 0 < imp <= 1:
                raise ValueError(f"importance of {code} must lie in (0, 1], got {imp}")


@dataclass(frozen=True)
class UtilityField:
    country: str
    resource: Resource
    values: np.ndarray

    def __post_init__(self):
        values = _frozen(self.values, float)
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ValueError("utility values must be finite and nonnegative")
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class GradeField:
    """Integer grades on ``0 .. n-1``.

    ``country`` is ``None`` for a per-resource forecast produced by aggregation.
    """

    country: str | None
    resource: Resource | None
    grades: np.ndarray
    n: int = DEFAULT_GRADES

    def __post_init__(self):
        grades = _frozen(self.grades, np.int64)
        if grades.size and (grades.min() < 0 or grades.max() > self.n - 1):
            raise ValueError(f"grades must lie in [0, {self.n - 1}]")
        object.__setattr__(self, "grades", grades)


def _check_alpha(alpha: float) -> None:
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")


def _check_size(world: World, layer: ResourceLayer) -> None:
    if layer.values.size != world.size:
        raise ValueError(f"layer has {layer.values.size} cells, world has {world.size}")


def deposit_utility(
    world: World,
    layer: ResourceLayer,
    country: str,
    g: DecayFunction,
    alpha: float,
    dist: DistanceField | None = None,
) -> UtilityField:
    """Oil, gas or fish utility: deposit size over ``g(distance)``.

    Cells inside another country's EEZ are scaled by ``alpha``.
    """
    if layer.resource not in DEPOSIT_RESOURCES:
        raise ValueError(f"deposit utility does not apply to the {layer.resource.value} layer")
    _check_alpha(alpha)
    _check_size(world, layer)
    if dist is None:
        dist = distance_field(world, country)
    u = layer.values / g(dist.values)
    u = np.where(world.foreign_mask(country), alpha * u, u)
    return UtilityField(country, layer.resource, u)


def maritime_utility(
    world: World,
    layer: ResourceLayer,
    country: str,
    params: MaritimeParams,
    alpha: float,
    dist: DistanceField | None = None,
) -> UtilityField:
    """Route utility.

    Arctic states get ``a`` in their own EEZ and ``a / h(distance)`` elsewhere;
    non-Arctic states get ``a * importance`` regardless of distance. Foreign
    EEZ cells are scaled by ``alpha`` in both cases. Off-route cells are 0.
    """
    if layer.resource is not Resource.MARITIME:
        raise ValueError(f"maritime utility needs the maritime layer, got {layer.resource.value}")
    _check_alpha(alpha)
    _check_size(world, layer)
    c = world.country(country)
    route = layer.values > 0
    if c.is_arctic:
        if dist is None:
            dist = distance_field(world, country)
        base = np.where(world.owned_mask(country), params.a, params.a / params.h(dist.values))
    else:
        if country not in params.importance:
            raise ValueError(f"no maritime importance configured for non-Arctic country {country!r}")
        base = np.full(world.size, params.a * params.importance[country])
    base = np.where(world.foreign_mask(country), alpha * base, base)
    return UtilityField(country, Resource.MARITIME, np.where(route, base, 0.0))


def quantize(
    field: UtilityField,
    n: int = DEFAULT_GRADES,
    mode: QuantizeMode | str = QuantizeMode.LINEAR,
    weight: float = 1.0,
    reference_max: float | None = None,
) -> GradeField:
    """Discretize ``weight * utility`` onto grades ``0 .. n-1``.

    Linear mode divides by the field's own maximum (or ``reference_max``,
    already in weighted units, when several fields must share one scale).
    Quantile mode cuts the positive values into ``n - 1`` equal-population
    bins; tied values share the bin of their midpoint rank. Zero utility is
    always grade 0.
    """
    if n < 2:
        raise ValueError(f"grade count must be at least 2, got {n}")
    if not weight > 0:
        raise ValueError(f"weight must be positive, got {weight}")
    mode = QuantizeMode(mode)
    x = weight * field.values
    grades = np.zeros(x.size, dtype=np.int64)
    positive = field.values > 0
    if positive.any():
        if mode is QuantizeMode.LINEAR:
            top = float(x.max()) if reference_max is None else float(reference_max)
            if not top > 0:
                raise ValueError("reference maximum must be positive")
            scaled = np.floor(n * x / (top * (1.0 + _REL_EPS)))
            grades = np.clip(scaled, 0, n - 1).astype(np.int64)
        else:
            # Ranks are taken on the raw utilities: positive rescaling cannot reorder them.
            vals = field.values[positive]
            ordered = np.sort(vals)
            below = np.searchsorted(ordered, vals, side="left")
            upto = np.searchsorted(ordered, vals, side="right")
            mid = (below + upto) / 2.0
            bins = np.floor((n - 1) * mid / vals.size).astype(np.int64)
            grades[positive] = 1 + np.minimum(bins, n - 2)
    grades[~positive] = 0
    return GradeField(field.country, field.resource, grades, n)

