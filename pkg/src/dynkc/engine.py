"""Ensemble of offset navigating nets answering dynamic k-center queries."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .metric import EuclideanMetric, PointRecord, RejectedInput
from .navnet import Mode, NavigatingNet, NetConfig, UnknownPoint, ValidationReport, distance_table

log = logging.getLogger(__name__)

MAX_NETS = 256


class InfeasibleParameters(ValueError):
    pass


def approximation_ratio(alpha: float, m: int) -> float:
    """Worst-case cost/OPT ratio of the ensemble: 2 * alpha * alpha**(1/m) / (alpha - 1)."""
    return 2 * alpha * alpha ** (1 / m) / (alpha - 1)


def derive_parameters(epsilon: float, max_nets: int = MAX_NETS) -> tuple[float, int]:
    """Pick ``(alpha, m)`` with ``approximation_ratio(alpha, m) <= 2 + epsilon``.

    For ``epsilon <= 1`` the closed form ``alpha = 2/eps`` and
    ``m = ceil((ln 2 + ln(1/eps)) / eps)`` is tried first. Whenever it misses
    the bound (or ``epsilon > 1``) the smallest feasible ``m`` is searched;
    for each ``m`` alpha is scanned on a geometric grid that also contains
    the exact minimiser ``m + 1``.
    """
    if not epsilon > 0:
        raise InfeasibleParameters(f"epsilon must be positive, got {epsilon}")
    target = 2 + epsilon
    if epsilon <= 1:
        alpha = 2 / epsilon
        m = math.ceil((math.log(2) + math.log(1 / epsilon)) / epsilon)
        if 1 <= m <= max_nets and approximation_ratio(alpha, m) <= target:
            return alpha, m
    for m in range(1, max_nets + 1):
        upper = max(16.0, 4.0 * (m + 1))
        grid = np.geomspace(1.0 + 1e-3, upper, 400).tolist() + [float(m + 1)]
        ratio, alpha = min((approximation_ratio(a, m), a) for a in grid)
        if ratio <= target:
            return alpha, m
    raise InfeasibleParameters(f"no (alpha, m) with m <= {max_nets} reaches 2 + {epsilon}")


@dataclass(frozen=True)
class EnsembleConfig:
    epsilon: float
    alpha: float
    m: int
    psi: float = 4.0
    mode: Mode = Mode.TREE

    @classmethod
    def from_epsilon(cls, epsilon: float, psi: float = 4.0, mode=Mode.TREE, max_nets: int = MAX_NETS):
        alpha, m = derive_parameters(epsilon, max_nets)
        return cls(epsilon, alpha, m, psi, Mode(mode))


@dataclass(frozen=True)
class Solution:
    p_star: int
    i_star: Optional[int]
    centers: frozenset
    cost_bound: float
    epoch: int


class Engine:
    def __init__(self, epsilon: float, k_hint: Optional[int] = None, mode=Mode.TREE, psi: float = 4.0,
                 max_nets: int = MAX_NETS):
        self.config = EnsembleConfig.from_epsilon(epsilon, psi, mode, max_nets)
        self.k_hint = k_hint
        self.metric = EuclideanMetric()
        self.nets = [
            NavigatingNet(NetConfig(self.config.alpha, p, self.config.m, psi, self.config.mode), self.metric)
            for p in range(1, self.config.m + 1)
        ]
        self.cost_factor = self.config.alpha / (self.config.alpha - 1)
        self.points: dict[int, PointRecord] = {}
        self._coords: set[tuple[float, ...]] = set()
        self._dim: Optional[int] = None
        self.epoch = 0
        self.last_climb_hops = 0
        self._solutions: dict[int, Solution] = {}

    @property
    def alpha(self):
        return self.config.alpha

    @property
    def m(self):
        return self.config.m

    def __len__(self):
        return len(self.points)

    def __contains__(self, pid):
        return pid in self.points

    def insert(self, point: PointRecord) -> None:
        if point.id in self.points:
            raise RejectedInput(f"point id {point.id} already present")
        if self._dim is not None and point.dim != self._dim:
            raise RejectedInput(f"point {point.id} has dimension {point.dim}, expected {self._dim}")
        if point.coords in self._coords:
            raise RejectedInput(f"point {point.id} duplicates the coordinates of a live point")
        for net in self.nets:
            net.insert(point)
        self.points[point.id] = point
        self._coords.add(point.coords)
        self._dim = point.dim
        self._touch()

    def delete(self, pid: int) -> bool:
        point = self.points.pop(pid, None)
        if point is None:
            log.warning("delete of unknown point %s ignored", pid)
            return False
        self._coords.discard(point.coords)
        for net in self.nets:
            net.delete(pid)
        if not self.points:
            self._dim = None
        self._touch()
        return True

    def _touch(self):
        self.epoch += 1
        self._solutions.clear()

    def solution(self, k: int) -> Solution:
        if k < 1:
            raise ValueError(f"k must be at least 1, got {k}")
        if not self.points:
            raise ValueError("engine is empty")
        cached = self._solutions.get(k)
        if cached is not None:
            return cached
        if len(self.points) <= k:
            sol = Solution(1, self.nets[0].r_min, frozenset(self.points), 0.0, self.epoch)
        else:
            best = None
            for p, net in enumerate(self.nets, start=1):
                i_star = net.smallest_scale_with_at_most(k)
                cost = self.cost_factor * net.scale(i_star)
                if best is None or cost < best[0]:
                    best = (cost, p, i_star)
            cost, p, i_star = best
            centers = frozenset(self.nets[p - 1].centers_at_scale(i_star))
            sol = Solution(p, i_star, centers, cost, self.epoch)
        self._solutions[k] = sol
        return sol

    def is_center(self, x: int, k: int) -> bool:
        if x not in self.points:
            return False
        return x in self.solution(k).centers

    def cluster_of(self, x: int, k: int) -> int:
        if x not in self.points:
            raise UnknownPoint(x)
        sol = self.solution(k)
        self.last_climb_hops = 0
        if x in sol.centers:
            return x
        net = self.nets[sol.p_star - 1]
        center = net.climb_to_scale(x, sol.i_star)
        self.last_climb_hops = net.last_climb_hops
        return center

    def validate(self) -> ValidationReport:
        report = ValidationReport()
        table = distance_table(self.points.values())
        for p, net in enumerate(self.nets, start=1):
            report.extend(net.validate(self.points.values(), _table=table), prefix=f"net {p}: ")
        return report
