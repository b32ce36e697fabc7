from __future__ import annotations

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from distopt.core import Point, Distribution
from distopt.participation import (
    ParticipationModel,
    ZeroVolumeDeltaError,
    actual,
    kappa,
    potential,
)

from conftest import make_dist


def test_power_curve_values():
    m = ParticipationModel.power(2.0, 0.5)
    assert m.m(4.0) == 4.0
    assert m.m(0.0) == 0.0
    assert m.m(-3.0) == 0.0, "non-positive appeal draws nobody"


def test_power_parameter_validation():
    with pytest.raises(ValueError):
        ParticipationModel.power(0.0, 0.5)
    with pytest.raises(ValueError):
        ParticipationModel.power(1.0, 0.0)
    with pytest.raises(ValueError):
        ParticipationModel.power(1.0, 1.5)


def test_saturating_curve_caps():
    m = ParticipationModel.saturating(2.0, 0.5, cap=3.0)
    assert m.m(1.0) == 2.0
    assert m.m(100.0) == 3.0


def test_table_curve_interpolates_through_origin():
    m = ParticipationModel.from_table([(1.0, 1.0), (2.0, 3.0)])
    assert m.m(0.5) == pytest.approx(0.5)  # linear from (0, 0)
    assert m.m(1.5) == pytest.approx(2.0)
    assert m.m(5.0) == 3.0, "flat extrapolation above the last knot"
    assert m.m(0.0) == 0.0


def test_table_knots_must_be_sane():
    with pytest.raises(ValueError):
        ParticipationModel.from_table([(2.0, 1.0), (1.0, 2.0)])
    with pytest.raises(ValueError):
        ParticipationModel.from_table([(1.0, 2.0), (2.0, 1.0)])


def test_scaled_multiplies_the_curve():
    m = ParticipationModel.power(1.0, 0.5)
    half = m.scaled(0.5)
    for q in (0.3, 1.0, 7.7):
        assert half.m(q) == pytest.approx(0.5 * m.m(q), rel=1e-15)


def test_potential_and_actual(linear_model):
    d = make_dist(("a", 4.0, 1.0, 1.0))
    assert potential(linear_model, d) == 4.0
    assert actual(linear_model, d) == 1.0, "participation is volume-capped"
    wide = make_dist(("a", 0.5, 1.0, 4.0))
    assert potential(linear_model, wide) == 0.5
    assert actual(linear_model, wide) == 0.5


def test_kappa_is_participation_slope(linear_model):
    d1 = make_dist(("a", 4.0, 1.0, 1.0))
    d2 = make_dist(("a", 4.0, 1.0, 1.0), ("b", 2.0, 1.0, 1.0))
    # M drops from 4 to 3 while one unit of volume arrives
    assert kappa(linear_model, d1, d2) == pytest.approx(-1.0, rel=1e-12)


def test_kappa_requires_a_volume_change(linear_model):
    d = make_dist(("a", 2.0, 1.0, 1.0))
    with pytest.raises(ZeroVolumeDeltaError):
        kappa(linear_model, d, d)


@given(
    st.floats(min_value=0.05, max_value=5.0),
    st.floats(min_value=0.05, max_value=1.0),
    st.floats(min_value=0.0, max_value=20.0),
    st.floats(min_value=0.0, max_value=20.0),
)
@settings(max_examples=200, deadline=None)
def test_power_curve_is_monotone(zeta, alpha, q1, q2):
    m = ParticipationModel.power(zeta, alpha)
    lo, hi = sorted((q1, q2))
    assert m.m(lo) <= m.m(hi) + 1e-12


@given(st.floats(min_value=0.05, max_value=5.0), st.floats(min_value=0.0, max_value=20.0))
@settings(max_examples=100, deadline=None)
def test_saturating_never_exceeds_cap(zeta, q):
    m = ParticipationModel.saturating(zeta, 0.7, cap=2.5)
    assert m.m(q) <= 2.5 + 1e-15
