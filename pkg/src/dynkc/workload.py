"""Datasets, update traces, replay with timing, and metric aggregation."""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .metric import PointRecord, RejectedInput
from .oracles import eval_cost, gonzalez

RNG_ALGORITHM = "numpy.PCG64"
QUERY_PROB = 0.0005

INSERT, DELETE, QUERY = "+", "-", "?"


class TraceError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class Event:
    kind: str
    point: Optional[PointRecord] = None
    id: Optional[int] = None

    @classmethod
    def insert(cls, point: PointRecord) -> "Event":
        return cls(INSERT, point, point.id)

    @classmethod
    def delete(cls, pid: int) -> "Event":
        return cls(DELETE, None, pid)

    @classmethod
    def query(cls) -> "Event":
        return cls(QUERY)


@dataclass
class Trace:
    seed: int
    events: list[Event]

    def counts(self) -> dict[str, int]:
        out = {INSERT: 0, DELETE: 0, QUERY: 0}
        for e in self.events:
            out[e.kind] += 1
        return out

    def check(self) -> None:
        """Raise TraceError unless every delete hits a live id and queries see a live point."""
        live: set[int] = set()
        used: set[int] = set()
        for n, e in enumerate(self.events):
            if e.kind == INSERT:
                if e.id in used:
                    raise TraceError(f"event {n}: id {e.id} inserted twice")
                live.add(e.id)
                used.add(e.id)
            elif e.kind == DELETE:
                if e.id not in live:
                    raise TraceError(f"event {n}: delete of non-live id {e.id}")
                live.remove(e.id)
            elif not live:
                raise TraceError(f"event {n}: query on an empty point set")


# -- datasets ------------------------------------------------------------

def load_points_csv(path) -> list[PointRecord]:
    """Read ``x,y[,...]`` lines; the first two columns are used, duplicates dropped."""
    points = []
    seen = set()
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            try:
                coords = (float(row[0]), float(row[1]))
            except (IndexError, ValueError):
                raise RejectedInput(f"{path}:{lineno}: expected 'x,y', got {','.join(row)!r}") from None
            if not all(math.isfinite(c) for c in coords):
                raise RejectedInput(f"{path}:{lineno}: non-finite coordinate")
            if coords in seen:
                continue
            seen.add(coords)
            points.append(PointRecord(len(points), coords))
    return points


def write_points_csv(points: Iterable[PointRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for p in points:
            fh.write(",".join(repr(c) for c in p.coords) + "\n")


def gen_random(n_seeds: int, per_seed: int, variance: float, rng_seed: int, shuffle: bool = True) -> list[PointRecord]:
    """Gaussian blobs around uniform seeds in [-1, 1]^2.

    Coordinates are drawn per blob from Normal(seed, variance); exact
    duplicates are redrawn. With ``shuffle`` the stream order is a random
    permutation, so a sliding window sees every blob.
    """
    if n_seeds < 1 or per_seed < 1 or not variance > 0:
        raise ValueError("need n_seeds >= 1, per_seed >= 1 and variance > 0")
    rng = np.random.Generator(np.random.PCG64(rng_seed))
    centers = rng.uniform(-1.0, 1.0, size=(n_seeds, 2))
    sd = math.sqrt(variance)
    coords = []
    seen = set()
    for cx, cy in centers:
        block = rng.normal((cx, cy), sd, size=(per_seed, 2))
        for x, y in block:
            xy = (float(x), float(y))
            while xy in seen:
                x, y = rng.normal((cx, cy), sd)
                xy = (float(x), float(y))
            seen.add(xy)
            coords.append(xy)
    if shuffle:
        order = rng.permutation(len(coords))
        coords = [coords[i] for i in order]
    return [PointRecord(i, xy) for i, xy in enumerate(coords)]


# -- traces --------------------------------------------------------------

def sliding_window_trace(points: Sequence[PointRecord], window: int, query_every: int, seed: int = 0) -> Trace:
    if window < 1 or query_every < 1:
        raise ValueError("window and query_every must be positive")
    events = []
    for t, p in enumerate(points):
        events.append(Event.insert(p))
        if t >= window:
            events.append(Event.delete(points[t - window].id))
        if (t + 1) % query_every == 0:
            events.append(Event.query())
    return Trace(seed, events)


def random_mix_trace(points: Sequence[PointRecord], delete_frac: float, rng_seed: int,
                     query_prob: float = QUERY_PROB, max_events: Optional[int] = None) -> Trace:
    """Each step inserts, deletes a uniformly random live point, or queries.

    Points enter in a random order. A delete or query drawn while nothing is
    live becomes an insert. The trace ends when an insert is drawn and the
    supply is exhausted, or after ``max_events``.
    """
    if delete_frac < 0 or query_prob < 0 or delete_frac + query_prob > 1:
        raise ValueError("probabilities out of range")
    rng = np.random.Generator(np.random.PCG64(rng_seed))
    order = rng.permutation(len(points))
    supply = iter(points[i] for i in order)
    live: list[int] = []
    events = []
    while max_events is None or len(events) < max_events:
        u = rng.random()
        if live and u < query_prob:
            events.append(Event.query())
        elif live and u < query_prob + delete_frac:
            slot = int(rng.integers(len(live)))
            pid = live[slot]
            last = live.pop()
            if last != pid:
                live[slot] = last
            events.append(Event.delete(pid))
        else:
            p = next(supply, None)
            if p is None:
                break
            live.append(p.id)
            events.append(Event.insert(p))
    return Trace(rng_seed, events)


def write_trace(trace: Trace, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"#seed {trace.seed}\n")
        for e in trace.events:
            if e.kind == INSERT:
                fh.write(f"+ {e.id} " + " ".join(repr(c) for c in e.point.coords) + "\n")
            elif e.kind == DELETE:
                fh.write(f"- {e.id}\n")
            else:
                fh.write("?\n")


def read_trace(path) -> Trace:
    seed = 0
    events = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            try:
                if parts[0] == "#seed":
                    seed = int(parts[1])
                elif parts[0].startswith("#"):
                    continue
                elif parts[0] == INSERT:
                    events.append(Event.insert(PointRecord(int(parts[1]), tuple(float(c) for c in parts[2:]))))
                elif parts[0] == DELETE and len(parts) == 2:
                    events.append(Event.delete(int(parts[1])))
                elif parts == [QUERY]:
                    events.append(Event.query())
                else:
                    raise ValueError(line.strip())
            except (IndexError, ValueError, RejectedInput) as exc:
                raise TraceError(f"{path}:{lineno}: malformed event ({exc})") from None
    return Trace(seed, events)


# -- replay --------------------------------------------------------------

def timing_summary(ns: Sequence[int]) -> dict:
    if not ns:
        return {"count": 0, "mean": 0.0, "p50": 0.0, "p99": 0.0, "total": 0}
    arr = np.asarray(ns, dtype=float)
    return {
        "count": len(ns),
        "mean": float(arr.mean()),
        "p50": float(np.percentile(arr, 50)),
        "p99": float(np.percentile(arr, 99)),
        "total": int(arr.sum()),
    }


@dataclass
class RunMetrics:
    config: dict
    insert_ns: list[int] = field(default_factory=list)
    delete_ns: list[int] = field(default_factory=list)
    query_ns: list[int] = field(default_factory=list)
    phi: list[float] = field(default_factory=list)
    cost_bound: list[float] = field(default_factory=list)
    centers: list[list[int]] = field(default_factory=list)
    gonzalez_phi: Optional[list[float]] = None

    @property
    def update_ns(self) -> list[int]:
        return self.insert_ns + self.delete_ns

    @property
    def total_ns(self) -> int:
        return sum(self.insert_ns) + sum(self.delete_ns) + sum(self.query_ns)

    def quality_ratios(self) -> Optional[list[float]]:
        if self.gonzalez_phi is None:
            return None
        return [a / b if b > 0 else 1.0 for a, b in zip(self.phi, self.gonzalez_phi)]

    def to_json(self) -> dict:
        doc = {
            "config": self.config,
            "timing_ns": {
                "insert": timing_summary(self.insert_ns),
                "delete": timing_summary(self.delete_ns),
                "query": timing_summary(self.query_ns),
                "total": self.total_ns,
            },
            "phi": self.phi,
            "cost_bound": self.cost_bound,
            "centers": self.centers,
        }
        if self.gonzalez_phi is not None:
            doc["gonzalez_phi"] = self.gonzalez_phi
            doc["quality_ratio"] = self.quality_ratios()
        return doc

    def dump(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1) + "\n", encoding="utf-8")


def replay(trace: Trace, engine, k: int, compare_gonzalez: bool = False) -> RunMetrics:
    """Replay a trace, timing updates and center queries; phi is evaluated afterwards."""
    if len(engine):
        raise TraceError("replay needs a fresh engine")
    cfg = engine.config
    metrics = RunMetrics(config={
        "epsilon": cfg.epsilon, "k": k, "alpha": cfg.alpha, "m": cfg.m, "psi": cfg.psi,
        "mode": cfg.mode.value, "seed": trace.seed, "rng": RNG_ALGORITHM,
    })
    live: dict[int, PointRecord] = {}
    snapshots: list[tuple[PointRecord, ...]] = []
    clock = time.perf_counter_ns
    for n, e in enumerate(trace.events):
        if e.kind == INSERT:
            if e.id in live:
                raise TraceError(f"event {n}: id {e.id} is already live")
            t0 = clock()
            engine.insert(e.point)
            metrics.insert_ns.append(clock() - t0)
            live[e.id] = e.point
        elif e.kind == DELETE:
            if e.id not in live:
                raise TraceError(f"event {n}: delete of non-live id {e.id}")
            t0 = clock()
            engine.delete(e.id)
            metrics.delete_ns.append(clock() - t0)
            del live[e.id]
        else:
            if not live:
                raise TraceError(f"event {n}: query on an empty engine")
            t0 = clock()
            sol = engine.solution(k)
            metrics.query_ns.append(clock() - t0)
            metrics.centers.append(sorted(sol.centers))
            metrics.cost_bound.append(sol.cost_bound)
            snapshots.append(tuple(live.values()))
    for pts, centers in zip(snapshots, metrics.centers):
        metrics.phi.append(eval_cost(pts, centers).phi)
    if compare_gonzalez:
        metrics.gonzalez_phi = [eval_cost(pts, gonzalez(pts, k)).phi for pts in snapshots]
    return metrics


# -- aggregation -----------------------------------------------------------

def geometric_mean(values: Iterable[float]) -> float:
    vals = list(values)
    if not vals:
        raise ValueError("geometric mean of no values")
    if any(not v > 0 for v in vals):
        raise ValueError("geometric mean needs positive values")
    return math.exp(sum(math.log(v) for v in vals) / len(vals))


def aggregate(runs: Sequence[dict]) -> dict:
    """Combine per-repeat metric documents of one (epsilon, k) cell.

    Timings are averaged arithmetically over repeats; the per-query quality
    ratios (when present) are combined with a geometric mean.
    """
    if not runs:
        raise ValueError("nothing to aggregate")
    cfg = dict(runs[0]["config"])
    out = {
        "config": cfg,
        "repeats": len(runs),
        "mean_total_ns": float(np.mean([r["timing_ns"]["total"] for r in runs])),
        "mean_insert_ns": float(np.mean([r["timing_ns"]["insert"]["mean"] for r in runs])),
        "mean_delete_ns": float(np.mean([r["timing_ns"]["delete"]["mean"] for r in runs])),
        "mean_query_ns": float(np.mean([r["timing_ns"]["query"]["mean"] for r in runs])),
        "phi": runs[0]["phi"],
        "phi_identical_across_repeats": all(r["phi"] == runs[0]["phi"] for r in runs),
    }
    ratios = runs[0].get("quality_ratio")
    if ratios:
        out["geomean_quality_ratio"] = geometric_mean(ratios)
        out["max_quality_ratio"] = max(ratios)
    return out


__all__ = [
    "Event", "Trace", "TraceError", "RunMetrics", "load_points_csv", "write_points_csv", "gen_random",
    "sliding_window_trace", "random_mix_trace", "write_trace", "read_trace", "replay",
    "geometric_mean", "aggregate", "timing_summary", "RNG_ALGORITHM",
]
