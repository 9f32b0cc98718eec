"""Reference implementations used to check the engine.

None of these share code with the nets: each is a direct, slow evaluation of
a definition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .metric import PointRecord

BRUTE_FORCE_LIMIT = 15


@dataclass(frozen=True)
class CostReport:
    phi: float
    argmax_point: int


@dataclass
class RNetCheck:
    ok: bool
    violations: list[str] = field(default_factory=list)

    def __bool__(self):
        return self.ok


def _by_id(points: Iterable[PointRecord]) -> list[PointRecord]:
    return sorted(points, key=lambda p: p.id)


def _coords(points: Sequence[PointRecord]) -> np.ndarray:
    return np.array([p.coords for p in points], dtype=float)


def _exact_matrix(points: Sequence[PointRecord]) -> np.ndarray:
    n = len(points)
    D = np.zeros((n, n))
    for a in range(n):
        for b in range(a + 1, n):
            D[a, b] = D[b, a] = math.dist(points[a].coords, points[b].coords)
    return D


def eval_cost(points: Iterable[PointRecord], centers: Iterable[int], chunk: int = 4096) -> CostReport:
    """phi(C) = max over points of the distance to the nearest center."""
    pts = _by_id(points)
    lookup = {p.id: p for p in pts}
    center_ids = sorted(set(centers))
    if not center_ids:
        raise ValueError("center set is empty")
    missing = [c for c in center_ids if c not in lookup]
    if missing:
        raise ValueError(f"centers {missing} are not among the points")
    C = _coords([lookup[c] for c in center_ids])
    X = _coords(pts)
    best_phi, best_row = -1.0, 0
    for lo in range(0, len(pts), chunk):
        block = X[lo:lo + chunk]
        near = np.sqrt(((block[:, None, :] - C[None, :, :]) ** 2).sum(axis=-1)).min(axis=1)
        row = int(np.argmax(near))
        if near[row] > best_phi:
            best_phi, best_row = float(near[row]), lo + row
    # Recompute the winner exactly so the reported value matches math.dist.
    x = pts[best_row]
    phi = min(math.dist(x.coords, lookup[c].coords) for c in center_ids)
    return CostReport(phi, x.id)


def _farthest_first(points: Sequence[PointRecord], picks: int) -> tuple[list[int], list[float]]:
    """Farthest-first traversal; returns picked ids and the gap at which each was picked."""
    pts = _by_id(points)
    X = _coords(pts)
    chosen = [0]
    gaps = [math.inf]
    near = np.sqrt(((X - X[0]) ** 2).sum(axis=1))
    while len(chosen) < min(picks, len(pts)):
        nxt = int(np.argmax(near))
        chosen.append(nxt)
        gaps.append(float(near[nxt]))
        near = np.minimum(near, np.sqrt(((X - X[nxt]) ** 2).sum(axis=1)))
    return [pts[i].id for i in chosen], gaps


def gonzalez(points: Iterable[PointRecord], k: int) -> list[int]:
    """Greedy 2-approximation: start at the lowest id, keep adding the farthest point."""
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    pts = list(points)
    if len(pts) <= k:
        return sorted(p.id for p in pts)
    return _farthest_first(pts, k)[0]


def brute_force_opt(points: Iterable[PointRecord], k: int) -> float:
    """Exact discrete k-center optimum by enumerating every center subset."""
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    pts = _by_id(points)
    n = len(pts)
    if n > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force limited to {BRUTE_FORCE_LIMIT} points, got {n}")
    if n <= k:
        return 0.0
    D = _exact_matrix(pts)
    best = math.inf
    for subset in combinations(range(n), k):
        cost = D[:, subset].min(axis=1).max()
        if cost < best:
            best = float(cost)
    return best


def opt_lower_bound(points: Iterable[PointRecord], k: int) -> float:
    """Half the gap of the (k+1)-th farthest-first pick; never exceeds OPT."""
    pts = list(points)
    if len(pts) <= k:
        return 0.0
    ids, gaps = _farthest_first(pts, k + 1)
    lookup = {p.id: p for p in pts}
    last = lookup[ids[-1]]
    gap = min(math.dist(last.coords, lookup[c].coords) for c in ids[:-1])
    return gap / 2


def check_rnet(candidate: Iterable[int], ground: Iterable[PointRecord], r: float) -> RNetCheck:
    pts = {p.id: p for p in ground}
    cand = sorted(set(candidate))
    result = RNetCheck(True)
    stray = [c for c in cand if c not in pts]
    if stray:
        result.ok = False
        result.violations.append(f"candidates {stray} are not in the ground set")
        return result
    for a, b in combinations(cand, 2):
        d = math.dist(pts[a].coords, pts[b].coords)
        if d < r:
            result.ok = False
            result.violations.append(f"separation: d({a},{b})={d!r} < {r!r}")
    for z in sorted(pts):
        if not any(math.dist(pts[z].coords, pts[c].coords) <= r for c in cand):
            result.ok = False
            result.violations.append(f"covering: point {z} farther than {r!r} from every candidate")
    return result


def greedy_rnet(points: Iterable[PointRecord], r: float) -> list[int]:
    """Scan points in the given order and keep each one at distance >= r from those kept."""
    kept: list[PointRecord] = []
    for p in points:
        if all(math.dist(p.coords, q.coords) >= r for q in kept):
            kept.append(p)
    return [p.id for p in kept]
