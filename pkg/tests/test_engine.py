import math
import random

import pytest

from dynkc.engine import (
    MAX_NETS, Engine, InfeasibleParameters, approximation_ratio, derive_parameters,
)
from dynkc.metric import PointRecord, RejectedInput
from dynkc.navnet import Mode, UnknownPoint

MODES = [Mode.LIST, Mode.TREE]


def pts(n, seed):
    rng = random.Random(seed)
    return [PointRecord.of(i, rng.random(), rng.random()) for i in range(n)]


@pytest.mark.parametrize("eps", [0.1, 0.5, 1.0, 4.0, 2.5, 10.0])
def test_derived_parameters_meet_bound(eps):
    alpha, m = derive_parameters(eps)
    assert alpha > 1 and 1 <= m <= MAX_NETS
    assert approximation_ratio(alpha, m) <= 2 + eps
    if m > 1:
        # no smaller ensemble can reach the bound (alpha = m is the exact minimiser for m - 1 nets)
        assert approximation_ratio(float(m), m - 1) > 2 + eps


def test_frozen_parameter_table():
    assert derive_parameters(4) == (3.0, 2)
    assert derive_parameters(1) == (9.0, 8)
    assert derive_parameters(0.5) == (19.0, 18)
    assert derive_parameters(0.1) == (120.0, 119)


def test_closed_form_insufficient_at_one():
    # alpha = 2/eps, m = ceil(ln 2 + ln 1) = 1 gives 8 > 3
    assert approximation_ratio(2.0, 1) == 8.0
    assert approximation_ratio(8.0, 8) == pytest.approx(2 * 8 * 8 ** 0.125 / 7)
    assert approximation_ratio(8.0, 8) <= 3


@pytest.mark.parametrize("eps", [0.0, -1.0])
def test_nonpositive_epsilon(eps):
    with pytest.raises(InfeasibleParameters):
        Engine(eps)


def test_infeasible_with_too_few_nets():
    with pytest.raises(InfeasibleParameters):
        derive_parameters(0.1, max_nets=10)


@pytest.mark.parametrize("mode", MODES)
def test_insert_reaches_every_net(mode):
    e = Engine(1.0, mode=mode)
    e.insert(PointRecord.of(0, 0.1, 0.2))
    assert all(len(net) == 1 for net in e.nets)
    for q in pts(20, 1)[1:]:
        e.insert(q)
    for net in e.nets:
        assert len(net.centers_at_scale(net.lo)) == 20


@pytest.mark.parametrize("mode", MODES)
def test_insert_then_delete_empties(mode):
    e = Engine(4.0, mode=mode)
    e.insert(PointRecord.of(3, 0.0, 0.0))
    assert e.delete(3)
    assert len(e) == 0 and all(len(net) == 0 for net in e.nets)


def test_delete_unknown(caplog):
    e = Engine(4.0)
    e.insert(PointRecord.of(0, 0.0, 0.0))
    epoch = e.epoch
    assert e.delete(42) is False
    assert e.epoch == epoch and len(e) == 1
    assert "unknown" in caplog.text


def test_rejects_bad_inserts():
    e = Engine(4.0)
    e.insert(PointRecord.of(0, 0.0, 0.0))
    with pytest.raises(RejectedInput):
        e.insert(PointRecord.of(0, 1.0, 0.0))
    with pytest.raises(RejectedInput):
        e.insert(PointRecord.of(1, 0.0, 0.0))
    with pytest.raises(RejectedInput):
        e.insert(PointRecord.of(2, 0.0, 0.0, 0.0))
    assert len(e) == 1


@pytest.mark.parametrize("mode", MODES)
def test_underfull_solution(mode):
    e = Engine(1.0, mode=mode)
    for q in pts(5, 2):
        e.insert(q)
    sol = e.solution(5)
    assert sol.centers == frozenset(range(5)) and sol.cost_bound == 0.0


def test_solution_errors():
    e = Engine(4.0)
    with pytest.raises(ValueError):
        e.solution(1)
    e.insert(PointRecord.of(0, 0.0, 0.0))
    with pytest.raises(ValueError):
        e.solution(0)


@pytest.mark.parametrize("mode", MODES)
def test_solution_is_argmin_over_nets(mode):
    e = Engine(1.0, mode=mode)
    for q in pts(60, 3):
        e.insert(q)
    for k in (1, 3, 7, 20):
        sol = e.solution(k)
        assert len(sol.centers) <= k
        costs = [e.cost_factor * net.scale(net.smallest_scale_with_at_most(k)) for net in e.nets]
        assert sol.cost_bound == min(costs)
        assert sol.p_star == costs.index(min(costs)) + 1


@pytest.mark.parametrize("mode", MODES)
def test_cache_invalidated_by_updates(mode):
    e = Engine(4.0, mode=mode)
    data = pts(30, 4)
    for q in data:
        e.insert(q)
    first = e.solution(3)
    assert e.solution(3) is first
    e.delete(next(iter(first.centers)))
    second = e.solution(3)
    assert second is not first and second.epoch == e.epoch
    assert second.centers <= set(e.points)


def test_singleton_is_center():
    e = Engine(4.0)
    e.insert(PointRecord.of(9, 1.0, 1.0))
    assert e.is_center(9, 1)
    assert not e.is_center(8, 1)


@pytest.mark.parametrize("mode", MODES)
def test_cluster_of_center_is_itself(mode):
    e = Engine(4.0, mode=mode)
    for q in pts(25, 5):
        e.insert(q)
    for c in e.solution(4).centers:
        assert e.cluster_of(c, 4) == c
    with pytest.raises(UnknownPoint):
        e.cluster_of(999, 4)


@pytest.mark.parametrize("mode", MODES)
def test_two_far_clusters(mode):
    rng = random.Random(6)
    e = Engine(1.0, mode=mode)
    groups = {}
    for i in range(20):
        base = (0.0, 0.0) if i % 2 else (100.0, 100.0)
        q = PointRecord.of(i, base[0] + rng.uniform(-0.1, 0.1), base[1] + rng.uniform(-0.1, 0.1))
        groups[i] = i % 2
        e.insert(q)
    centers = e.solution(2).centers
    assert len(centers) == 2 and {groups[c] for c in centers} == {0, 1}
    for i in range(20):
        c = e.cluster_of(i, 2)
        assert groups[c] == groups[i]
        assert math.dist(e.points[i].coords, e.points[c].coords) <= e.solution(2).cost_bound


@pytest.mark.parametrize("mode", MODES)
def test_insert_set_delete_subset_valid(mode):
    rng = random.Random(8)
    e = Engine(0.5, mode=mode)
    data = pts(40, 8)
    for q in data:
        e.insert(q)
    for x in rng.sample(range(40), 25):
        e.delete(x)
    report = e.validate()
    assert report.ok, str(report)
    assert len(e) == 15


@pytest.mark.parametrize("mode", MODES)
def test_interleaved_updates_keep_all_nets_valid(mode):
    rng = random.Random(12)
    e = Engine(1.0, mode=mode)
    live = []
    for n in range(80):
        if live and rng.random() < 0.35:
            e.delete(live.pop(rng.randrange(len(live))))
        else:
            e.insert(PointRecord.of(n, rng.random(), rng.random()))
            live.append(n)
        assert e.validate().ok
