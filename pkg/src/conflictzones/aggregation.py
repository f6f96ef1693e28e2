"""Threshold aggregation of grade vectors.

Each cell carries one grade per country (step 1) or one forecast grade per
resource (step 2). Components are sorted in nonincreasing order and cells are
compared lexicographically on the sorted vectors, so the highest grade
decides first. The resulting preorder is cut into intensity classes either by
rank percentile or by explicit reference vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from typing import Mapping, Sequence

import numpy as np

from .utility import GradeField, Resource


class Ordering(IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def sort_desc(v: Sequence[int]) -> tuple[int, ...]:
    return tuple(sorted((int(g) for g in v), reverse=True))


def compare_intensity(u: Sequence[int], v: Sequence[int]) -> Ordering:
    """Lexicographic comparison of two (descending-sorted) grade vectors."""
    if len(u) != len(v):
        raise ValueError(f"cannot compare vectors of length {len(u)} and {len(v)}")
    for a, b in zip(u, v):
        if a != b:
            return Ordering.GREATER if a > b else Ordering.LESS
    return Ordering.EQUAL


@dataclass(frozen=True)
class Quantile:
    classes: int = 6

    def __post_init__(self):
        if self.classes < 2:
            raise ValueError(f"quantile scheme needs at least 2 classes, got {self.classes}")


@dataclass(frozen=True)
class ReferenceVectors:
    """Explicit thresholds: a cell is above every boundary it equals or exceeds."""

    boundaries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        bounds = tuple(tuple(int(g) for g in b) for b in self.boundaries)
        if not bounds:
            raise ValueError("reference scheme needs at least one boundary vector")
        for b in bounds:
            if list(b) != sorted(b, reverse=True):
                raise ValueError(f"boundary {b} is not sorted in nonincreasing order")
        for lo, hi in zip(bounds, bounds[1:]):
            if compare_intensity(lo, hi) is not Ordering.LESS:
                raise ValueError("boundary vectors must be strictly increasing")
        object.__setattr__(self, "boundaries", bounds)

    @property
    def classes(self) -> int:
        return len(self.boundaries) + 1


ThresholdScheme = Quantile | ReferenceVectors


@dataclass(frozen=True)
class Ranking:
    """Total preorder over cells.

    ``vectors[c]`` is cell c's sorted grade vector, ``level[c]`` its dense rank
    (0 = lowest intensity; equal vectors share a level) and ``order`` the cell
    indices in ascending intensity, ties kept in cell order.
    """

    vectors: np.ndarray
    level: np.ndarray
    order: np.ndarray

    @property
    def size(self) -> int:
        return int(self.level.size)

    def below(self) -> np.ndarray:
        """Number of cells strictly less intense than each cell."""
        counts = np.bincount(self.level)
        starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
        return starts[self.level]

    def levels(self) -> list[np.ndarray]:
        """Equivalence classes of cells, from least to most intense."""
        return [np.flatnonzero(self.level == k) for k in range(int(self.level.max()) + 1)]


def rank_vectors(matrix: np.ndarray) -> Ranking:
    """Rank the rows of a (cells x components) grade matrix."""
    matrix = np.asarray(matrix, dtype=np.int64)
    if matrix.ndim != 2:
        raise ValueError("expected a (cells x components) grade matrix")
    vectors = -np.sort(-matrix, axis=1)
    # np.lexsort uses its last key as the primary one.
    order = np.lexsort(vectors[:, ::-1].T) if vectors.shape[1] else np.arange(len(vectors))
    ranked = vectors[order]
    steps = np.any(ranked[1:] != ranked[:-1], axis=1) if len(ranked) > 1 else np.zeros(0, bool)
    dense = np.concatenate(([0], np.cumsum(steps)))
    level = np.empty(len(order), dtype=np.int64)
    level[order] = dense
    for arr in (vectors, level, order):
        arr.setflags(write=False)
    return Ranking(vectors, level, order)


def rank_cells(fields: Sequence[GradeField]) -> Ranking:
    """Order cells by the intensity of their per-country grade vectors."""
    if not fields:
        raise ValueError("need at least one grade field")
    size, n = fields[0].grades.size, fields[0].n
    for f in fields:
        if f.grades.size != size:
            raise ValueError("grade fields cover different grids")
        if f.n != n:
            raise ValueError("grade fields use different grade scales")
    return rank_vectors(np.stack([f.grades for f in fields], axis=1))


@dataclass(frozen=True)
class ConflictClassField:
    classes: np.ndarray
    n_classes: int
    ranking: Ranking

    def counts(self) -> list[int]:
        return np.bincount(self.classes, minlength=self.n_classes).tolist()


def classify(ranking: Ranking, scheme: ThresholdScheme) -> ConflictClassField:
    """Assign each cell an intensity class in ``0 .. N-1``.

    Quantile: a tie group lands wholly in the class of its midpoint rank
    percentile; all-zero vectors are class 0. Reference vectors: the class is
    the number of boundaries the cell's vector reaches.
    """
    total = ranking.size
    if isinstance(scheme, Quantile):
        n = scheme.classes
        lo = ranking.below()
        size = np.bincount(ranking.level)[ranking.level]
        mid = lo + size / 2.0
        classes = np.minimum(np.floor(n * mid / total), n - 1).astype(np.int64)
        classes[~ranking.vectors.any(axis=1)] = 0
    elif isinstance(scheme, ReferenceVectors):
        width = ranking.vectors.shape[1]
        for b in scheme.boundaries:
            if len(b) != width:
                raise ValueError(f"boundary {b} has length {len(b)}, vectors have {width}")
        classes = np.zeros(total, dtype=np.int64)
        for b in scheme.boundaries:
            reached = [compare_intensity(v, b) is not Ordering.LESS for v in ranking.vectors]
            classes += np.array(reached, dtype=np.int64)
    else:
        raise TypeError(f"unknown threshold scheme {scheme!r}")
    classes.setflags(write=False)
    return ConflictClassField(classes, scheme.classes, ranking)


def aggregate_resource(fields: Sequence[GradeField], scheme: ThresholdScheme | None = None) -> GradeField:
    """Step 1: combine all countries' grades for one resource into a forecast."""
    if not fields:
        raise ValueError("need at least one grade field")
    n = fields[0].n
    scheme = Quantile(n) if scheme is None else scheme
    if scheme.classes != n:
        raise ValueError(f"forecast scheme has {scheme.classes} classes, grade scale has {n}")
    resource = fields[0].resource
    if any(f.resource != resource for f in fields):
        raise ValueError("grade fields mix resources")
    result = classify(rank_cells(fields), scheme)
    return GradeField(None, resource, result.classes, n)


def weight_grades(grades: np.ndarray, weight: float, n: int) -> np.ndarray:
    """Scale grades by ``weight``, round half up, clamp to ``0 .. n-1``."""
    if not weight > 0:
        raise ValueError(f"weight must be positive, got {weight}")
    if weight == 1:
        return np.asarray(grades, dtype=np.int64)
    scaled = [math.floor(weight * int(g) + 0.5) for g in grades]
    return np.clip(np.array(scaled, dtype=np.int64), 0, n - 1)


def aggregate_overall(
    forecasts: Mapping[Resource, GradeField],
    weights: Mapping[Resource, float] | None = None,
    scheme: ThresholdScheme | None = None,
) -> ConflictClassField:
    """Step 2: rank cells by their weighted per-resource forecast grades and classify."""
    if not forecasts:
        raise ValueError("need at least one forecast")
    weights = weights or {}
    fields = list(forecasts.values())
    n = fields[0].n
    size = fields[0].grades.size
    if any(f.n != n or f.grades.size != size for f in fields):
        raise ValueError("forecasts must share grid and grade scale")
    columns = [weight_grades(f.grades, weights.get(r, 1.0), n) for r, f in forecasts.items()]
    ranking = rank_vectors(np.stack(columns, axis=1))
    return classify(ranking, Quantile(6) if scheme is None else scheme)
