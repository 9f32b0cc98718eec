import json
import math
import random

import pytest

from dynkc.engine import Engine
from dynkc.metric import PointRecord, RejectedInput, pairwise_extremes
from dynkc.oracles import brute_force_opt
from dynkc.workload import (
    Event, Trace, TraceError, aggregate, gen_random, geometric_mean, load_points_csv, random_mix_trace,
    read_trace, replay, sliding_window_trace, write_points_csv, write_trace,
)


def test_csv_two_lines(tmp_path):
    f = tmp_path / "p.csv"
    f.write_text("0,0\n3,4\n")
    a, b = load_points_csv(f)
    assert math.dist(a.coords, b.coords) == 5.0


def test_csv_dedup(tmp_path):
    f = tmp_path / "p.csv"
    f.write_text("0,0\n1,1\n0,0\n2,2,9\n")
    pts = load_points_csv(f)
    assert [p.coords for p in pts] == [(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]
    assert [p.id for p in pts] == [0, 1, 2]


def test_csv_bad_line_reports_location(tmp_path):
    f = tmp_path / "p.csv"
    f.write_text("0,0\nabc\n")
    with pytest.raises(RejectedInput, match=":2:"):
        load_points_csv(f)


def test_csv_roundtrip_and_extremes(tmp_path):
    rng = random.Random(1)
    pts = [PointRecord.of(i, rng.random(), rng.random()) for i in range(1000)]
    f = tmp_path / "p.csv"
    write_points_csv(pts, f)
    back = load_points_csv(f)
    assert [p.coords for p in back] == [p.coords for p in pts]
    assert pairwise_extremes(back) == pairwise_extremes(pts)


def test_gen_random_sizes_and_determinism():
    a = gen_random(100, 200, 0.001, 5)
    assert len(a) == 20000 and len({p.coords for p in a}) == 20000
    assert a == gen_random(100, 200, 0.001, 5)
    assert a != gen_random(100, 200, 0.001, 6)


def test_gen_random_large_count_arithmetic():
    # the full-scale dataset is 100 blobs of 20000 points; checked on a smaller blob count
    assert len(gen_random(3, 20000, 0.001, 0)) == 60000


def test_gen_random_rejects_bad_parameters():
    with pytest.raises(ValueError):
        gen_random(0, 5, 0.1, 0)
    with pytest.raises(ValueError):
        gen_random(5, 5, 0.0, 0)


def test_sliding_window_unrolled():
    pts = [PointRecord.of(i, float(i), 0.0) for i in range(1, 6)]
    trace = sliding_window_trace(pts, 2, 100)
    got = [(e.kind, e.id) for e in trace.events]
    assert got == [("+", 1), ("+", 2), ("+", 3), ("-", 1), ("+", 4), ("-", 2), ("+", 5), ("-", 3)]


def test_sliding_window_query_count():
    pts = [PointRecord.of(i, float(i), 0.0) for i in range(2000)]
    trace = sliding_window_trace(pts, 600, 20)
    assert trace.counts()["?"] == 100
    trace.check()


def test_random_mix_pure_insertions():
    pts = [PointRecord.of(i, float(i), 1.0) for i in range(50)]
    trace = random_mix_trace(pts, 0.0, 3, query_prob=0.0)
    assert [e.kind for e in trace.events] == ["+"] * 50
    assert sorted(e.id for e in trace.events) == list(range(50))


def test_random_mix_valid_and_deterministic():
    pts = [PointRecord.of(i, float(i), 1.0) for i in range(500)]
    a = random_mix_trace(pts, 0.3, 9, query_prob=0.01)
    a.check()
    assert a == random_mix_trace(pts, 0.3, 9, query_prob=0.01)


def test_random_mix_bad_probabilities():
    with pytest.raises(ValueError):
        random_mix_trace([], 0.9, 0, query_prob=0.2)


def test_trace_file_roundtrip(tmp_path):
    pts = gen_random(3, 10, 0.01, 2)
    trace = random_mix_trace(pts, 0.2, 4, query_prob=0.05)
    f = tmp_path / "t.txt"
    write_trace(trace, f)
    assert read_trace(f) == trace


def test_trace_file_malformed(tmp_path):
    f = tmp_path / "t.txt"
    f.write_text("+ 1 0.0 0.0\n* what\n")
    with pytest.raises(TraceError, match=":2:"):
        read_trace(f)


def test_trace_check_catches_bad_delete():
    with pytest.raises(TraceError):
        Trace(0, [Event.delete(3)]).check()
    with pytest.raises(TraceError):
        Trace(0, [Event.query()]).check()


def test_replay_single_point():
    trace = Trace(0, [Event.insert(PointRecord.of(0, 1.0, 2.0)), Event.query()])
    m = replay(trace, Engine(4.0), 1)
    assert m.phi == [0.0] and len(m.query_ns) == 1


def test_replay_needs_fresh_engine():
    e = Engine(4.0)
    e.insert(PointRecord.of(0, 0.0, 0.0))
    with pytest.raises(TraceError):
        replay(Trace(0, []), e, 1)


@pytest.mark.parametrize("eps", [0.5, 1.0, 4.0])
def test_replay_two_clusters_within_bound(eps):
    rng = random.Random(3)
    pts = []
    for i in range(30):
        cx = 0.0 if i % 2 else 50.0
        pts.append(PointRecord.of(i, cx + rng.uniform(0, 0.5), rng.uniform(0, 0.5)))
    trace = sliding_window_trace(pts, 10, 2)
    m = replay(trace, Engine(eps), 2)
    # rebuild the live set at each query to get OPT there
    live, opts = {}, []
    for e in trace.events:
        if e.kind == "+":
            live[e.id] = e.point
        elif e.kind == "-":
            del live[e.id]
        else:
            opts.append(brute_force_opt(list(live.values()), 2))
    assert len(opts) == len(m.phi) == 15
    for phi, bound, opt in zip(m.phi, m.cost_bound, opts):
        assert phi <= bound <= (2 + eps) * opt


def test_replay_deterministic_quality():
    pts = gen_random(5, 40, 0.01, 1)
    trace = sliding_window_trace(pts, 60, 20)
    a = replay(trace, Engine(1.0), 5, compare_gonzalez=True)
    b = replay(trace, Engine(1.0), 5, compare_gonzalez=True)
    assert a.phi == b.phi and a.centers == b.centers
    assert a.gonzalez_phi == b.gonzalez_phi
    doc = json.loads(json.dumps(a.to_json()))
    assert doc["config"]["k"] == 5 and len(doc["quality_ratio"]) == len(a.phi)


@pytest.mark.parametrize("values,expected", [([1, 1, 1], 1.0), ([2, 8], 4.0), ([3.5], 3.5)])
def test_geometric_mean(values, expected):
    assert geometric_mean(values) == pytest.approx(expected, rel=1e-15)


def test_geometric_mean_rejects():
    with pytest.raises(ValueError):
        geometric_mean([])
    with pytest.raises(ValueError):
        geometric_mean([1.0, 0.0])


def test_aggregate_is_pure_over_json():
    pts = gen_random(4, 30, 0.01, 3)
    trace = sliding_window_trace(pts, 50, 15)
    runs = [replay(trace, Engine(4.0), 3, compare_gonzalez=True).to_json() for _ in range(3)]
    stored = json.loads(json.dumps(runs))
    agg = aggregate(stored)
    assert agg == aggregate(json.loads(json.dumps(runs)))
    assert agg["repeats"] == 3 and agg["phi_identical_across_repeats"]
    assert agg["mean_total_ns"] == pytest.approx(sum(r["timing_ns"]["total"] for r in runs) / 3)
    assert agg["geomean_quality_ratio"] == pytest.approx(geometric_mean(runs[0]["quality_ratio"]))
