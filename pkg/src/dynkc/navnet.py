"""A single navigating net (or cover tree) over a dynamic point set.

Every point ``x`` carries a top level ``t_x``: it belongs to the net ``Y_i``
for each level ``i <= t_x``. Exactly one point, the root, has ``t = inf``.
Level ``i`` has radius ``scale(i) = alpha ** (i + p/m - 1)``. Validity of the
hierarchy is expressed entirely through the tops:

* separation: ``d(x, y) >= scale(min(t_x, t_y))`` for ``x != y``
* covering: each non-root ``x`` has some ``y`` with ``t_y > t_x`` and
  ``d(x, y) <= scale(t_x + 1)``
* nesting holds by construction.

In list mode each center ``x`` in ``Y_i`` owns the navigation list
``L[x][i] = {z in Y_{i-1} : d(z, x) <= psi * scale(i)}`` and every point keeps
reverse min-heaps ``M[x][i] = {y in Y_{i+1} : x in L[y][i+1]}``. Lists are
stored for levels ``beta_x .. t_x`` (``hi`` for the root), where ``beta_x`` is
the largest level below which every list of ``x`` is ``{x}``.

In tree mode each non-root point stores one parent at level ``t_x + 1``.
"""

from __future__ import annotations

import enum
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .heap import IndexedMinHeap
from .metric import EuclideanMetric, PointRecord, RejectedInput

log = logging.getLogger(__name__)

ROOT_TOP = math.inf


class Mode(str, enum.Enum):
    LIST = "list"
    TREE = "tree"


class NetConfigError(ValueError):
    pass


class UnknownPoint(KeyError):
    pass


@dataclass(frozen=True)
class NetConfig:
    alpha: float
    p: int = 1
    m: int = 1
    psi: float = 4.0
    mode: Mode = Mode.LIST

    def __post_init__(self):
        if not self.alpha > 1:
            raise NetConfigError(f"alpha must exceed 1, got {self.alpha}")
        if self.m < 1 or not 1 <= self.p <= self.m:
            raise NetConfigError(f"need 1 <= p <= m, got p={self.p} m={self.m}")
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.mode is Mode.LIST and not self.psi >= 4:
            raise NetConfigError(f"psi must be at least 4 in list mode, got {self.psi}")


@dataclass
class Violation:
    kind: str
    level: Optional[int]
    detail: str

    def __str__(self):
        where = "" if self.level is None else f" @ level {self.level}"
        return f"{self.kind}{where}: {self.detail}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind, level, detail):
        self.violations.append(Violation(kind, level, detail))

    def extend(self, other: "ValidationReport", prefix: str = ""):
        for v in other.violations:
            self.violations.append(Violation(v.kind, v.level, prefix + v.detail))

    def __str__(self):
        if self.ok:
            return "no violations"
        return "\n".join(str(v) for v in self.violations)


class NavigatingNet:
    def __init__(self, config: NetConfig, metric=None):
        self.config = config
        self.alpha = float(config.alpha)
        self.offset = config.p / config.m - 1
        self.psi = float(config.psi)
        self.mode = config.mode
        self.cost_factor = self.alpha / (self.alpha - 1)
        # Descent radius, in units of the level's scale. cost_factor is the
        # smallest value keeping the candidate sets complete; list mode also
        # needs psi * alpha to fill its navigation lists.
        if self.mode is Mode.LIST:
            self._reach = max(self.psi * self.alpha, self.cost_factor)
        else:
            self._reach = self.cost_factor
        self.dist = metric if metric is not None else EuclideanMetric()
        self._log_alpha = math.log(self.alpha)
        self._scales: dict[int, float] = {}

        self._points: dict[int, PointRecord] = {}
        self._top: dict[int, float] = {}
        self._by_top: dict[int, set[int]] = {}
        self._root: Optional[int] = None
        self._count: dict[int, int] = {}
        self.lo: Optional[int] = None
        self.hi: Optional[int] = None

        self._lists: dict[int, dict[int, dict[int, float]]] = {}
        self._heaps: dict[int, dict[int, IndexedMinHeap]] = {}
        self._beta: dict[int, Optional[int]] = {}

        self._parent: dict[int, Optional[tuple[int, float]]] = {}
        self._pool: Optional[dict[int, dict[int, float]]] = None
        self._promoted: set[int] = set()
        self._children: dict[int, dict[int, set[int]]] = {}

        self._pending: dict[int, set[int]] = {}
        self.last_climb_hops = 0

    # -- scales --------------------------------------------------------

    def scale(self, i: int) -> float:
        s = self._scales.get(i)
        if s is None:
            s = self._scales[i] = self.alpha ** (i + self.offset)
        return s

    def level_for(self, d: float) -> int:
        """Lowest level whose scale is at least ``d``."""
        j = math.ceil(math.log(d) / self._log_alpha - self.offset)
        while self.scale(j - 1) >= d:
            j -= 1
        while self.scale(j) < d:
            j += 1
        return j

    # -- basic queries -------------------------------------------------

    def __len__(self):
        return len(self._points)

    def __contains__(self, pid):
        return pid in self._points

    @property
    def root(self) -> Optional[int]:
        return self._root

    @property
    def r_min(self) -> Optional[int]:
        return self.lo

    @property
    def r_max(self) -> Optional[int]:
        return self.hi

    def point(self, pid: int) -> PointRecord:
        return self._points[pid]

    def top(self, pid: int) -> float:
        return self._top[pid]

    def beta(self, pid: int) -> Optional[int]:
        return self._beta.get(pid)

    def count_at(self, i: int) -> int:
        n = len(self._points)
        if self.hi is None:
            return n
        if i >= self.hi:
            return 0 if self._root is None else 1
        if i < self.lo:
            return n
        return self._count[i]

    def is_center_at(self, x: int, i: int) -> bool:
        t = self._top.get(x)
        return t is not None and t >= i

    def centers_at_scale(self, i: int) -> set[int]:
        if not self._points:
            raise ValueError("net is empty")
        if self.mode is Mode.TREE and self._root is not None:
            return self._tree_centers(i)
        out = set() if self._root is None else {self._root}
        for level, members in self._by_top.items():
            if level >= i:
                out |= members
        return out

    def _tree_centers(self, i: int) -> set[int]:
        # Top-down traversal: Y_{j-1} is Y_j plus the children hanging at j.
        current = [self._root]
        if self.hi is None or i >= self.hi:
            return set(current)
        j = self.hi
        while j > i:
            grown = []
            for y in current:
                kids = self._children[y].get(j)
                if kids:
                    grown.extend(kids)
            current.extend(grown)
            j -= 1
        return set(current)

    def smallest_scale_with_at_most(self, k: int) -> int:
        if k < 1:
            raise ValueError(f"k must be at least 1, got {k}")
        if not self._points:
            raise ValueError("net is empty")
        if len(self._points) <= k:
            return self.lo if self.lo is not None else 0
        j = self.hi
        while self.count_at(j - 1) <= k:
            j -= 1
        return j

    def climb_to_scale(self, x: int, target: int) -> int:
        """Follow covering links upward from ``x`` until reaching a center at ``target``."""
        if x not in self._top:
            raise UnknownPoint(x)
        y = x
        t = self._top[y]
        hops = 0
        while t < target:
            if self.mode is Mode.LIST:
                y = self._heaps[y][t].peek()[1]
            else:
                y = self._parent[y][0]
            t = self._top[y]
            hops += 1
        self.last_climb_hops = hops
        return y

    # -- counters and levels --------------------------------------------

    def _covers(self, t, j):
        return t is not None and t >= j

    def _set_top(self, x: int, new) -> None:
        """Change (or set, or clear with ``None``) the top of ``x``; keeps counters exact."""
        old = self._top.get(x)
        lo0, hi0 = self.lo, self.hi
        n_old = len(self._top)
        root_old = 0 if self._root is None else 1
        old_counts = self._count

        if old is not None:
            if old == ROOT_TOP:
                self._root = None
            else:
                members = self._by_top[old]
                members.discard(x)
                if not members:
                    del self._by_top[old]
            del self._top[x]
        if new is not None:
            self._top[x] = new
            if new == ROOT_TOP:
                self._root = x
            else:
                self._by_top.setdefault(new, set()).add(x)

        if self._by_top:
            self.lo = min(self._by_top)
            self.hi = max(self._by_top) + 1
        else:
            self.lo = self.hi = None
            self._count = {}
            return

        counts = {}
        for j in range(self.lo, self.hi + 1):
            if hi0 is None:
                before = n_old
            elif j >= hi0:
                before = root_old
            elif j < lo0:
                before = n_old
            else:
                before = old_counts[j]
            counts[j] = before + self._covers(new, j) - self._covers(old, j)
        self._count = counts

    # -- list-mode helpers -----------------------------------------------

    def _list(self, y: int, j: int):
        L = self._lists[y].get(j)
        return L if L is not None else {y: 0.0}

    def _ensure_list(self, y: int, j: int) -> dict[int, float]:
        L = self._lists[y].get(j)
        if L is None:
            L = self._lists[y][j] = {y: 0.0}
        return L

    def _heap(self, x: int, j: int) -> IndexedMinHeap:
        H = self._heaps[x].get(j)
        if H is None:
            H = self._heaps[x][j] = IndexedMinHeap()
        return H

    def _link(self, y: int, j: int, z: int, d: float) -> None:
        """Record ``z in L[y][j]`` together with its reverse entry."""
        self._ensure_list(y, j)[z] = d
        self._heap(z, j - 1).push(d, y)

    def _unlink_heap(self, z: int, j: int, y: int) -> None:
        H = self._heaps[z][j]
        H.remove(y)
        if not H:
            del self._heaps[z][j]

    def _store_top(self, y: int) -> Optional[int]:
        t = self._top[y]
        return self.hi if t == ROOT_TOP else int(t)

    def _normalize(self, y: int) -> None:
        """Restore the stored list range ``[beta_y, top]`` after edits."""
        L = self._lists[y]
        top = self._store_top(y)
        if top is None:
            L.clear()
            self._beta[y] = None
            return
        for j in [j for j in L if j > top]:
            del L[j]
        if not L:
            L[top] = {y: 0.0}
        low = min(L)
        for j in range(low, top + 1):
            if j not in L:
                L[j] = {y: 0.0}
        while len(L[low]) > 1:
            low -= 1
            L[low] = {y: 0.0}
        while low < top and len(L[low + 1]) == 1:
            del L[low]
            low += 1
        self._beta[y] = low

    # -- descent ---------------------------------------------------------

    def _descend(self, q: PointRecord, exclude: Optional[int] = None, stop: Optional[int] = None,
                 reach: Optional[float] = None):
        """Candidate sets ``Z[j] ⊇ {y in Y_j : d(q, y) <= reach * scale(j)}``.

        Walks from the top of the hierarchy downward until a level's set is
        empty or ``stop`` is reached. Points awaiting a covering repair are
        injected at their own level so the sets stay complete mid-repair.
        """
        dist = self.dist
        points = self._points
        known: dict[int, float] = {}
        reach = self._reach if reach is None else reach
        fast = isinstance(dist, EuclideanMetric)
        qc = q.coords
        euclid = math.dist

        def d_to(z):
            d = known.get(z)
            if d is None:
                if fast:
                    dist.calls += 1
                    d = euclid(qc, points[z].coords)
                else:
                    d = dist(q, points[z])
                known[z] = d
                if d == 0.0 and z != exclude:
                    raise RejectedInput(f"point {q.id} duplicates coordinates of point {z}")
            return d

        if self._root is not None:
            d_root = d_to(self._root)
            start = self.level_for(d_root) if d_root > 0 else self.hi
            if self.hi is not None:
                start = max(start, self.hi)
            current = {self._root: d_root}
        else:
            # Mid-repair with the root gone: seed with every point at the
            # highest level that holds something besides ``exclude``.
            tops = sorted(self._by_top, reverse=True)
            start = next((lv for lv in tops if self._by_top[lv] - {exclude}), None)
            if start is None:
                return {}
            radius = reach * self.scale(start)
            current = {}
            for lv in tops:
                if lv < start:
                    break
                for z in sorted(self._by_top[lv]):
                    if z != exclude and d_to(z) <= radius:
                        current[z] = known[z]
        levels = {start: current}
        j = start
        list_mode = self.mode is Mode.LIST
        while (current or any(lv <= j for lv in self._pending)) and (stop is None or j > stop):
            radius = reach * self.scale(j - 1)
            nxt = {}
            for y in current:
                if self._top[y] >= j - 1 and y not in nxt:
                    d = current[y]
                    if d <= radius:
                        nxt[y] = d
                if list_mode:
                    members = self._list(y, j)
                else:
                    members = self._children[y].get(j, ())
                for z in members:
                    if z == exclude or z in nxt:
                        continue
                    d = d_to(z)
                    if d <= radius:
                        nxt[z] = d
            for z in self._pending.get(j, ()):
                if z != exclude and z not in nxt and self._top.get(z) == j - 1:
                    d = d_to(z)
                    if d <= radius:
                        nxt[z] = d
            j -= 1
            current = levels[j] = nxt
        return levels

    @staticmethod
    def _nearest(candidates: dict[int, float]):
        return min(((d, z) for z, d in candidates.items()), default=None)

    # -- insertion ---------------------------------------------------------

    def insert(self, q: PointRecord) -> None:
        if q.id in self._points:
            raise RejectedInput(f"point id {q.id} already present")
        if not self._points:
            self._points[q.id] = q
            self._lists[q.id] = {}
            self._heaps[q.id] = {}
            self._children[q.id] = {}
            self._parent[q.id] = None
            self._beta[q.id] = None
            self._set_top(q.id, ROOT_TOP)
            return

        levels = self._descend(q)
        ell = None
        for j in sorted(levels):
            near = self._nearest(levels[j])
            if near is not None and near[0] <= self.scale(j):
                ell = j
                break
        top = ell - 1

        self._points[q.id] = q
        self._lists[q.id] = {}
        self._heaps[q.id] = {}
        self._children[q.id] = {}
        self._set_top(q.id, top)

        if self.mode is Mode.TREE:
            d, parent = self._nearest(levels[ell])
            self._parent[q.id] = (parent, d)
            self._children[parent].setdefault(ell, set()).add(q.id)
            return

        touched = {q.id}
        if self._root is not None:
            touched.add(self._root)
        for j, Z in levels.items():
            # q in L[y][j] for centers y in Y_j, whenever q sits in Y_{j-1}.
            if j - 1 <= top:
                radius = self.psi * self.scale(j)
                for y, d in Z.items():
                    if d <= radius:
                        self._link(y, j, q.id, d)
                        touched.add(y)
            # L[q][j+1] collects members of Y_j, whenever q sits in Y_{j+1}.
            if j + 1 <= top:
                radius = self.psi * self.scale(j + 1)
                for z, d in Z.items():
                    if d <= radius:
                        self._link(q.id, j + 1, z, d)
        for y in touched:
            self._normalize(y)

    # -- deletion ----------------------------------------------------------

    def delete(self, pid: int) -> bool:
        if pid not in self._points:
            log.warning("delete of unknown point %s ignored", pid)
            return False
        pending: dict[int, set[int]] = defaultdict(set)
        touched: set[int] = set()

        if self.mode is Mode.LIST:
            for j, L in self._lists[pid].items():
                s = self.scale(j)
                for z, d in L.items():
                    if z == pid:
                        continue
                    self._unlink_heap(z, j - 1, pid)
                    if self._top[z] == j - 1 and d <= s:
                        pending[j].add(z)
            for j, H in self._heaps[pid].items():
                for _, y in H:
                    del self._lists[y][j + 1][pid]
                    touched.add(y)
        else:
            for j, kids in self._children[pid].items():
                for z in kids:
                    self._parent[z] = None
                    pending[j].add(z)
            link = self._parent[pid]
            if link is not None:
                parent = link[0]
                at = int(self._top[pid]) + 1
                kids = self._children[parent][at]
                kids.discard(pid)
                if not kids:
                    del self._children[parent][at]

        deleted = self._points[pid]
        self._set_top(pid, None)
        for table in (self._points, self._lists, self._heaps, self._beta, self._parent, self._children):
            table.pop(pid, None)
        touched.discard(pid)

        self._pending = pending
        if pending and self.mode is Mode.TREE:
            # Every orphan, and every point it may be promoted into, lies within
            # scale(j) of the deleted point, so one search around it yields all
            # possible new parents: Y_j ∩ B(z, s(j)) ⊆ Y_j ∩ B(deleted, 2 s(j)).
            self._pool = self._descend(deleted, stop=min(pending), reach=max(2.0, self.cost_factor))
            self._promoted = set()
        try:
            touched |= self._repair()
        finally:
            self._pending = {}
            self._pool = None
            self._promoted = set()

        if self.mode is Mode.LIST:
            if self._root is not None:
                touched.add(self._root)
            for y in touched:
                if y in self._points:
                    self._normalize(y)
        return True

    def _repair(self) -> set[int]:
        """Restore covering bottom-up, promoting points that lost every coverer."""
        pending = self._pending
        touched: set[int] = set()
        while pending:
            j = min(pending)
            if self._root is None and self.count_at(j - 1) == 1:
                (w,) = self._by_top[max(self._by_top)]
                self._set_top(w, ROOT_TOP)
                touched.add(w)
                pending.clear()
                break
            for z in sorted(pending[j]):
                if self._top.get(z) == j - 1 and not self._recover(z, j):
                    self._promote(z, j, touched)
                    pending.setdefault(j + 1, set()).add(z)
                pending[j].discard(z)
            del pending[j]
        return touched

    def _recover(self, z: int, j: int) -> bool:
        """True if ``z`` (top ``j - 1``) is covered by some center of ``Y_j``."""
        s = self.scale(j)
        if self.mode is Mode.LIST:
            H = self._heaps[z].get(j - 1)
            return bool(H) and H.peek()[0] <= s
        here = self._points[z]
        pool = set(self._pool.get(j, ()))
        pool.update(w for w in self._promoted if self._top.get(w, -math.inf) >= j)
        if self._root is not None:
            pool.add(self._root)
        pool.discard(z)
        near = min(((self.dist(here, self._points[w]), w) for w in pool), default=None)
        if near is None or near[0] > s:
            return False
        d, parent = near
        self._parent[z] = (parent, d)
        self._children[parent].setdefault(j, set()).add(z)
        return True

    def _promote(self, z: int, j: int, touched: set[int]) -> None:
        self._set_top(z, j)
        if self.mode is Mode.TREE:
            self._promoted.add(z)
            return
        levels = self._descend(self._points[z], exclude=z, stop=j - 1)
        radius = self.psi * self.scale(j)
        self._ensure_list(z, j)
        for w, d in levels.get(j - 1, {}).items():
            if d <= radius:
                self._link(z, j, w, d)
        radius = self.psi * self.scale(j + 1)
        for y, d in levels.get(j + 1, {}).items():
            if d <= radius:
                self._link(y, j + 1, z, d)
                touched.add(y)
        touched.add(z)

    # -- validation --------------------------------------------------------

    def validate(self, all_points: Optional[Iterable[PointRecord]] = None, _table=None) -> ValidationReport:
        """Check every structural invariant against a brute-force recomputation."""
        report = ValidationReport()
        if all_points is not None:
            expected = {p.id for p in all_points}
            if expected != set(self._points):
                report.add("membership", None, f"net holds {sorted(set(self._points) ^ expected)} unexpectedly")
        ids = sorted(self._points)
        n = len(ids)
        if n == 0:
            if self._root is not None or self._by_top or self._count:
                report.add("storage", None, "empty net carries state")
            return report
        if self._root is None:
            report.add("root", None, "nonempty net has no root")
        roots = [x for x in ids if self._top[x] == ROOT_TOP]
        if len(roots) > 1:
            report.add("root", None, f"several roots: {roots}")

        index, D = _table if _table is not None else distance_table(self._points.values())
        order = [index[x] for x in ids]
        D = D[np.ix_(order, order)]
        T = np.array([self._top[x] for x in ids], dtype=float)

        self._check_geometry(ids, T, D, report)
        self._check_counters(ids, T, report)
        if self.mode is Mode.LIST:
            self._check_lists(ids, T, D, report)
        else:
            self._check_tree(ids, T, D, report)
        return report

    def _scale_array(self, levels: np.ndarray) -> np.ndarray:
        out = np.full(levels.shape, math.inf)
        finite = np.isfinite(levels)
        for lv in np.unique(levels[finite]):
            out[levels == lv] = self.scale(int(lv))
        return out

    def _check_geometry(self, ids, T, D, report):
        n = len(ids)
        pair_top = np.minimum.outer(T, T)
        np.fill_diagonal(pair_top, math.inf)
        bad = np.argwhere(np.isfinite(pair_top) & (D < self._scale_array(pair_top)))
        for a, b in bad:
            if a < b:
                lv = int(pair_top[a, b])
                report.add("separation", lv, f"d({ids[a]},{ids[b]})={D[a, b]!r} < scale {self.scale(lv)!r}")
        for a in range(n):
            if not math.isfinite(T[a]):
                continue
            up = int(T[a]) + 1
            ok = (T >= up) & (D[a] <= self.scale(up))
            if not ok.any():
                report.add("covering", up, f"point {ids[a]} has no center within {self.scale(up)!r}")
        if self._by_top:
            tops = {int(t) for t in T if math.isfinite(t)}
            if tops != set(self._by_top):
                report.add("storage", None, "top index out of sync")
            for lv, members in self._by_top.items():
                for x in members:
                    if self._top.get(x) != lv:
                        report.add("storage", lv, f"point {x} indexed at wrong level")
        expected_lo = int(T[np.isfinite(T)].min()) if np.isfinite(T).any() else None
        expected_hi = int(T[np.isfinite(T)].max()) + 1 if np.isfinite(T).any() else None
        if (self.lo, self.hi) != (expected_lo, expected_hi):
            report.add("storage", None, f"(r_min, r_max)={(self.lo, self.hi)} expected {(expected_lo, expected_hi)}")

    def _check_counters(self, ids, T, report):
        if self.hi is None:
            if self._count:
                report.add("counter", None, "counters stored without nontrivial scales")
            return
        if set(self._count) != set(range(self.lo, self.hi + 1)):
            report.add("counter", None, f"counter levels {sorted(self._count)} do not span [{self.lo}, {self.hi}]")
        previous = None
        for j in sorted(self._count):
            truth = int((T >= j).sum())
            if self._count[j] != truth:
                report.add("counter", j, f"count {self._count[j]} but |Y| = {truth}")
            if previous is not None and self._count[j] > previous:
                report.add("nesting", j, "counts increase with level")
            previous = self._count[j]

    def _check_lists(self, ids, T, D, report):
        pos = {x: a for a, x in enumerate(ids)}
        expected_heaps: dict[tuple[int, int], dict[int, float]] = defaultdict(dict)
        for a, x in enumerate(ids):
            L = self._lists[x]
            top = self._store_top(x)
            if top is None:
                if L:
                    report.add("storage", None, f"lone root {x} stores lists")
                continue
            beta = self._beta.get(x)
            if beta is None or sorted(L) != list(range(beta, top + 1)):
                report.add("storage", None, f"point {x} stores levels {sorted(L)} not [{beta}, {top}]")
                continue
            for j, members in L.items():
                mask = (T >= j - 1) & (D[a] <= self.psi * self.scale(j))
                truth = {ids[b] for b in np.flatnonzero(mask)}
                if set(members) != truth:
                    report.add("list", j, f"L[{x}] has {sorted(members)} expected {sorted(truth)}")
                for z, d in members.items():
                    if z in pos and d != D[a, pos[z]]:
                        report.add("list", j, f"L[{x}] caches d({z})={d!r}, true {D[a, pos[z]]!r}")
                    if z != x:
                        expected_heaps[(z, j - 1)][x] = d
            if len(L[beta]) != 1:
                report.add("beta", beta, f"L[{x}] at beta is not a singleton")
            if beta < top and len(L[beta + 1]) == 1:
                report.add("beta", beta, f"beta of {x} is not maximal")
        for x in ids:
            for j, H in self._heaps[x].items():
                want = expected_heaps.pop((x, j), None)
                got = {y: d for d, y in H}
                if not H:
                    report.add("heap", j, f"empty heap stored for {x}")
                if got != (want or {}):
                    report.add("heap", j, f"M[{x}] has {sorted(got)} expected {sorted(want or {})}")
                if not H.is_valid():
                    report.add("heap", j, f"M[{x}] violates heap order")
                elif H and H.peek() != min((d, y) for y, d in got.items()):
                    report.add("heap", j, f"M[{x}] reports a wrong minimum")
        for (x, j), want in expected_heaps.items():
            report.add("heap", j, f"M[{x}] missing, expected {sorted(want)}")

    def _check_tree(self, ids, T, D, report):
        pos = {x: a for a, x in enumerate(ids)}
        seen = defaultdict(set)
        for y in ids:
            for j, kids in self._children[y].items():
                for z in kids:
                    seen[z].add((y, j))
        for a, x in enumerate(ids):
            link = self._parent.get(x)
            if not math.isfinite(T[a]):
                if link is not None:
                    report.add("parent", None, f"root {x} has a parent")
                continue
            up = int(T[a]) + 1
            if link is None:
                report.add("parent", up, f"point {x} has no parent")
                continue
            y, d = link
            if y not in pos or self._top[y] < up:
                report.add("parent", up, f"parent {y} of {x} is not a center at level {up}")
            elif d != D[a, pos[y]] or d > self.scale(up):
                report.add("parent", up, f"parent {y} of {x} is not within {self.scale(up)!r}")
            if seen.get(x, set()) != {(y, up)}:
                report.add("parent", up, f"child index of {x} is {sorted(seen.get(x, ()))}")


def distance_table(points: Iterable[PointRecord]):
    """Exact pairwise distances (same arithmetic as the nets) keyed by point id."""
    pts = list(points)
    index = {p.id: a for a, p in enumerate(pts)}
    n = len(pts)
    D = np.zeros((n, n))
    for a in range(n):
        ca = pts[a].coords
        for b in range(a + 1, n):
            D[a, b] = D[b, a] = math.dist(ca, pts[b].coords)
    return index, D
