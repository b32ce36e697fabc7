from __future__ import annotations

import dataclasses

import pytest

from distopt.core import Distribution, Point, PointIncrement, ProducerTransform
from distopt.instances import build_objects
from distopt.oracle import brute_force_w_max, find_scenario_instance
from distopt.optimizer import (
    CarveoutInfeasibleError,
    OptimizerConfig,
    _assert_no_dominating_extension,
    continue_to_d2_star,
    determine_d_star,
    generate_carveout,
)
from distopt.participation import ParticipationModel, potential
from distopt.sequence import SequenceConfig
from distopt.thresholds import (
    CONTINUE_TO_D2_STAR_THM4,
    SATURATED_CONSUMER,
    SCENARIO_II_CONSUMER_PREFERS,
    STAY_AT_D_STAR_THM2,
    UNDER_SERVED,
    ExtensionContext,
)

from conftest import FIVE_POINT, LADDER, SECOND_CROSSING, make_dist, make_instance


def run(instance):
    pool, model, t, cfg = build_objects(instance)
    return determine_d_star(pool, cfg, model, t), pool, model, t, cfg


def test_five_point_reference_build():
    res, pool, model, t, _ = run(FIVE_POINT)
    assert sorted(res.d_star.ids()) == ["c2", "c3", "c4", "c5"]
    assert res.n_star == 4.0
    assert res.verdict.kind == STAY_AT_D_STAR_THM2
    assert res.verdict.is_nash and res.verdict.is_pareto
    assert res.verdict.witness is not None
    assert res.verdict.witness.kappa_r2 == pytest.approx(-0.5, rel=1e-12)
    # M(D*) = 3.5 against N* = 4
    assert res.crossing_gap == pytest.approx(0.125, rel=1e-12)


def test_declining_tail_is_walked_past_a_negative_probe():
    res, pool, model, t, _ = run(LADDER)
    assert sorted(res.d_star.ids()) == [f"p{i:02d}" for i in range(8)]
    assert res.n_star == pytest.approx(0.26 * 8, rel=1e-12)
    w_star = min(potential(model, res.d_star), res.d_star.n)
    assert w_star == pytest.approx(1.86, rel=1e-12)
    # the probe turned negative at seven points, but the walk went one
    # further and kept the higher-volume snapshot
    assert len(res.trace.steps) == 8
    assert res.verdict.witness is not None
    assert res.verdict.witness.kappa_r2 == pytest.approx(-1 / 13, rel=1e-9)
    bf = brute_force_w_max(pool, model, t, subset_cap=12)
    assert w_star == bf.best_prefix_w


def test_pool_too_small_to_reach_a_crossing():
    res, *_ = run(make_instance([("u", 10.0, 1.0, 1.0)]))
    assert res.verdict.kind == UNDER_SERVED
    assert not res.verdict.is_nash


def test_pool_with_no_drawing_power_is_degenerate():
    res, *_ = run(make_instance([("z", 0.0, 1.0, 1.0), ("y", -2.0, 1.0, 0.5)]))
    assert res.verdict.kind == SATURATED_CONSUMER
    assert sorted(res.d_star.ids()) == ["z"]


def test_flat_participation_is_reported_as_saturation():
    # identical appeal everywhere: M never moves while volume piles up
    res, *_ = run(
        make_instance(
            [("a", 1.0, 1.0, 0.2), ("b", 1.0, 1.0, 0.2), ("c", 1.0, 1.0, 0.2)],
            zeta=3.0,
        )
    )
    assert res.verdict.kind == SATURATED_CONSUMER


def test_step_budget_halts_the_build():
    pool, model, t, cfg = build_objects(LADDER)
    res = determine_d_star(pool, dataclasses.replace(cfg, max_steps=1), model, t)
    assert res.budget_exhausted
    assert res.steps == 1
    assert any("budget" in note for note in res.verdict.notes)


def test_runs_are_deterministic():
    first, *_ = run(LADDER)
    second, *_ = run(LADDER)
    assert sorted(first.d_star.ids()) == sorted(second.d_star.ids())
    assert first.n_star == second.n_star
    assert [s.added.point.id for s in first.trace.steps] == [
        s.added.point.id for s in second.trace.steps
    ]


def test_second_crossing_chain_preserves_both_values():
    res, pool, model, t, cfg = run(SECOND_CROSSING)
    assert res.verdict.kind == CONTINUE_TO_D2_STAR_THM4
    chained = continue_to_d2_star(res, pool, cfg, model, t)
    assert chained.d2_star is not None
    assert sorted(chained.d2_star.ids()) == ["a", "b", "f"]
    assert chained.d2_delta_v == pytest.approx(0.0, abs=1e-9)
    assert chained.d2_delta_s == pytest.approx(0.0, abs=1e-9)
    assert chained.d2_crossing_gap <= cfg.crossing_rel_tol


# -- carveouts ---------------------------------------------------------------

CFG = OptimizerConfig(sequence=SequenceConfig())
M05 = ParticipationModel.power(1.0, 0.5)
IDENT = ProducerTransform.identity()


def test_carveout_requires_a_fractional_slope():
    base = make_dist(("a", 2.0, 1.0, 1.0))
    steep = PointIncrement(Point("x", 50.0, 1.0), 1.0)
    with pytest.raises(ValueError):
        generate_carveout(base, steep, CFG, ParticipationModel.power(1.0, 1.0), IDENT)


def test_carveout_reports_budget_infeasibility():
    base = make_dist(("hi", 1.9, 1.0, 1.3), ("lo", 0.1, 1.0, 0.02))
    ext = PointIncrement(Point("x", 3.0, 0.5), 0.4)
    with pytest.raises(CarveoutInfeasibleError):
        generate_carveout(base, ext, CFG, M05, IDENT)


def test_carveout_cannot_consume_the_extension_itself():
    # the base sits far past the crossing, so landing would need to carve
    # more volume than the extension brings
    base = make_dist(
        ("a", 2.2, 1.0, 0.9), ("f1", 0.6, 0.2, 0.25), ("f2", 0.55, 0.2, 0.25),
        ("f3", 0.5, 0.2, 0.25), ("f4", 0.45, 0.2, 0.25)
    )
    ext = PointIncrement(Point("x", 4.0, 0.6), 0.5)
    with pytest.raises(CarveoutInfeasibleError):
        generate_carveout(base, ext, CFG, M05, IDENT)


def test_searcher_found_carveout_satisfies_its_contract():
    found = find_scenario_instance(
        SCENARIO_II_CONSUMER_PREFERS, budget=20, rng_seed=0, require_carveout=True
    )
    assert found is not None
    res = found.result
    assert res.carveouts, "searcher promised a realized carveout"
    carve = res.carveouts[-1]
    assert carve.trigger_kind == SCENARIO_II_CONSUMER_PREFERS
    assert carve.n_y > 0.0
    assert carve.iterations >= 1
    assert carve.consumer_gain >= -1e-12
    assert carve.producer_slack >= -1e-12
    assert carve.landing_gap <= 0.05 + 1e-12
    pool_ids = {str(p["id"]) for p in found.instance["points"]}
    assert set(carve.y.ids()) <= pool_ids


def test_dominating_extension_guard_fires():
    ctx = ExtensionContext.synthesize(
        n_r1=0.2, n_r2=0.5, tp2_ratio=1.5, c2_ratio=3.0, alpha=0.9
    )
    with pytest.raises(RuntimeError):
        _assert_no_dominating_extension(ctx)


def test_chunked_build_lands_at_least_as_high_as_full_points():
    points = [("a", 3.0, 1.0, 1.0), ("b", 2.0, 1.0, 1.0), ("c", 1.0, 1.0, 1.0)]
    chunked = make_instance(
        points,
        optimizer={"increment_policy": {"kind": "unit_chunks", "chunk": 0.25}},
    )
    plain = make_instance(points)
    r_chunk, _, model, _, _ = run(chunked)
    r_plain, *_ = run(plain)
    assert all(s.added.weight <= 0.25 + 1e-12 for s in r_chunk.trace.steps)
    w_chunk = min(potential(model, r_chunk.d_star), r_chunk.d_star.n)
    w_plain = min(potential(model, r_plain.d_star), r_plain.d_star.n)
    # finer increments can only get closer to the crossing, never worse
    assert w_chunk >= w_plain - 1e-12
