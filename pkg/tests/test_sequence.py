from __future__ import annotations

import pytest

from distopt.core import Distribution, Point, PointIncrement, ProducerTransform
from distopt.instances import build_objects
from distopt.participation import ParticipationModel
from distopt.optimizer import determine_d_star
from distopt.sequence import (
    SequenceConfig,
    best_increment,
    best_next_in_sequence,
    greedy_sweep,
    is_viable,
    order_prefers,
    remaining_pool,
    seed_distribution,
)

from conftest import LADDER, make_dist

M11 = ParticipationModel.power(1.0, 1.0)
IDENT = ProducerTransform.identity()


def test_remaining_pool_subtracts_current_weights():
    pool = make_dist(("a", 2, 1, 2.0), ("b", 1, 1, 1.0))
    cur = make_dist(("a", 2, 1, 0.5))
    left = dict((pt.id, w) for pt, w in remaining_pool(cur, pool))
    assert left == {"a": 1.5, "b": 1.0}


def test_seed_picks_the_highest_first_content_value():
    pool = make_dist(("hi", 5.0, 1.0, 1.0), ("mix", 2.0, 3.0, 1.0))
    seeds = seed_distribution(pool, SequenceConfig(), M11, IDENT)
    # T(p) * M(c): 3*2 beats 1*5
    assert [i.point.id for i in seeds] == ["mix"]


def test_explicit_seed_policy_uses_listed_ids():
    pool = make_dist(("hi", 5.0, 1.0, 1.0), ("mix", 2.0, 3.0, 1.0))
    cfg = SequenceConfig(seed_policy="explicit", seed_ids=("hi",))
    assert [i.point.id for i in seed_distribution(pool, cfg, M11, IDENT)] == ["hi"]


def test_config_validation():
    with pytest.raises(ValueError):
        SequenceConfig(weight_policy="unit_chunks")
    with pytest.raises(ValueError):
        SequenceConfig(candidate_policy="top_k")
    with pytest.raises(ValueError):
        SequenceConfig(seed_policy="explicit")


def test_equal_candidates_break_ties_by_id():
    cur = make_dist(("z", 2.0, 1.0, 1.0))
    pool = make_dist(("z", 2.0, 1.0, 1.0), ("b", 2.0, 1.0, 1.0), ("a", 2.0, 1.0, 1.0))
    inc = best_increment(cur, pool, SequenceConfig(), M11, IDENT)
    assert inc.point.id == "a"


def test_chunked_weights_split_points():
    pool = make_dist(("a", 2.0, 1.0, 0.26))
    cfg = SequenceConfig(weight_policy="unit_chunks", chunk=0.1)
    trace = greedy_sweep(pool, cfg, M11, IDENT)
    assert [round(s.added.weight, 10) for s in trace.steps] == [0.1, 0.1, 0.06]


def test_sweep_step_bookkeeping_is_consistent():
    pool, model, t, cfg = build_objects(LADDER)
    trace = greedy_sweep(pool, cfg.sequence, model, t)
    assert [s.added.point.id for s in trace.steps] == sorted(pool.ids())
    n = 0.0
    for s in trace.steps:
        n += s.added.weight
        assert s.n_after == pytest.approx(n, rel=1e-12)
        assert s.m_after == pytest.approx(model.m(s.q_after), rel=1e-12)
    assert trace.is_monotone_decreasing
    assert trace.is_generally_decreasing


def test_probe_stops_at_a_non_positive_slope():
    pool, model, t, cfg = build_objects(LADDER)
    prefix = Distribution([(pt, w) for pt, w in pool.items() if pt.id <= "p06"])
    probe = best_next_in_sequence(prefix, pool, cfg.sequence, model, t)
    assert [i.point.id for i in probe.increments] == ["p07"]
    assert probe.kappa == pytest.approx(-1.0 / 13.0, rel=1e-12)
    assert not probe.exhausted


def test_probe_reports_exhaustion_when_the_pool_runs_dry():
    # b raises the running mean, so the block slope lands inside (0, 1)
    # and the pool dries up before the probe can settle
    pool = make_dist(("a", 3.0, 1.0, 0.5), ("b", 3.2, 1.0, 0.5))
    prefix = make_dist(("a", 3.0, 1.0, 0.5))
    probe = best_next_in_sequence(prefix, pool, SequenceConfig(), M11, IDENT)
    assert probe.exhausted
    assert [i.point.id for i in probe.increments] == ["b"]
    assert probe.kappa == pytest.approx(0.2, rel=1e-12)


def test_order_prefers_higher_appeal_when_transforms_match():
    d_a = make_dist(("a", 2.0, 1.0, 1.0))
    hi = (Point("x", 3.0, 1.0), 1.0)
    lo = (Point("y", 1.0, 1.0), 1.0)
    assert order_prefers(hi, lo, d_a, M11, IDENT)
    assert not order_prefers(lo, hi, d_a, M11, IDENT)


def test_viability_respects_the_build_order():
    pool, model, t, cfg = build_objects(LADDER)
    res = determine_d_star(pool, cfg, model, t)
    # a candidate far better than anything accepted could not have been
    # deferred to the tail, so it is not a consistent late arrival
    too_good = PointIncrement(Point("z", 5.0, 1.0), 0.3)
    modest = PointIncrement(Point("z", 0.5, 1.0), 0.3)
    assert not is_viable(too_good, res.d_star, res.trace, model, t)
    assert is_viable(modest, res.d_star, res.trace, model, t)
