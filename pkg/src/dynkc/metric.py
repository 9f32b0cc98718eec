"""Points, the Euclidean distance oracle and pairwise distance statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence


class RejectedInput(ValueError):
    """Raised for malformed points, mismatched dimensions or duplicates."""


@dataclass(frozen=True, slots=True)
class PointRecord:
    id: int
    coords: tuple[float, ...]

    def __post_init__(self):
        if self.id < 0:
            raise RejectedInput(f"point id must be non-negative, got {self.id}")
        if len(self.coords) < 1:
            raise RejectedInput("point needs at least one coordinate")
        if not all(math.isfinite(c) for c in self.coords):
            raise RejectedInput(f"point {self.id} has non-finite coordinates")

    @classmethod
    def of(cls, id: int, *coords: float) -> "PointRecord":
        return cls(id, tuple(float(c) for c in coords))

    @property
    def dim(self) -> int:
        return len(self.coords)


@dataclass(frozen=True, slots=True)
class MetricStats:
    d_min: float
    d_max: float

    @property
    def aspect_ratio(self) -> float:
        return self.d_max / self.d_min


def distance(a: PointRecord, b: PointRecord) -> float:
    if len(a.coords) != len(b.coords):
        raise RejectedInput(
            f"dimension mismatch: point {a.id} has {len(a.coords)}, point {b.id} has {len(b.coords)}"
        )
    return math.dist(a.coords, b.coords)


class EuclideanMetric:
    """Distance oracle that counts its calls.

    The nets and the engine route every distance evaluation through one
    instance so query paths can be audited for distance-free behaviour.
    """

    name = "euclidean"

    def __init__(self):
        self.calls = 0

    def __call__(self, a: PointRecord, b: PointRecord) -> float:
        self.calls += 1
        return math.dist(a.coords, b.coords)


def pairwise_extremes(points: Sequence[PointRecord]) -> MetricStats:
    """Brute-force O(n^2) scan for the smallest and largest pairwise distance."""
    if len(points) < 2:
        raise RejectedInput("need at least two points")
    d_min = math.inf
    d_max = 0.0
    for a, b in combinations(points, 2):
        d = distance(a, b)
        if d == 0.0:
            raise RejectedInput(f"points {a.id} and {b.id} share coordinates")
        d_min = min(d_min, d)
        d_max = max(d_max, d)
    return MetricStats(d_min, d_max)


def check_dimensions(points: Iterable[PointRecord]) -> int:
    dims = {p.dim for p in points}
    if len(dims) > 1:
        raise RejectedInput(f"mixed dimensions: {sorted(dims)}")
    return dims.pop() if dims else 0
