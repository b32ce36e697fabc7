"""Producer-side value of a distribution and its response to extensions.

Two value functions matter:

* the realized value ``S = E(T|D) * W`` — mean transformed producer value
  times realized participation;
* the potential value ``V = E(T|D) * M`` — the same mean times potential
  participation, which upper-bounds S and is the quantity the greedy
  builder climbs below the crossing.

``delta_v`` has an exact closed form that needs only the mean value of the
added (or removed) mass; ``delta_s`` reduces to simple expressions on
either side of the supply/demand crossing and is computed directly when a
shift straddles it.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .core import (
    Distribution,
    EmptyDistributionError,
    ProducerTransform,
    apply_increment,
    expected_t,
    q_of,
    remove_subdistribution,
)
from .participation import ParticipationModel, actual, potential


class Regime(enum.Enum):
    """Where a shift sits relative to the supply/demand crossing."""

    BELOW_CROSSING = "below_crossing"  # volume <= potential on both ends
    AT_OR_ABOVE_CROSSING = "at_or_above_crossing"
    STRADDLES_CROSSING = "straddles_crossing"


@dataclass(frozen=True)
class ValueDelta:
    delta_s: float
    delta_v: float
    regime: Regime


def s_value(
    d: Distribution, model: ParticipationModel, t: ProducerTransform
) -> float:
    """Realized producer value S(D) = E(T|D) * min(M, N)."""
    if d.is_empty():
        return 0.0
    return expected_t(d, t) * actual(model, d)


def v_value(
    d: Distribution, model: ParticipationModel, t: ProducerTransform
) -> float:
    """Potential producer value V(D) = E(T|D) * M(Q(D))."""
    if d.is_empty():
        return 0.0
    return expected_t(d, t) * potential(model, d)


def _difference_mean_t(
    smaller: Distribution, larger: Distribution, t: ProducerTransform
) -> float:
    """Mean transformed producer value of (larger − smaller)."""
    diff = remove_subdistribution(larger, smaller)
    if diff.is_empty():
        return 0.0
    return expected_t(diff, t)


def delta_v(
    d: Distribution,
    d_prime: Distribution,
    model: ParticipationModel,
    t: ProducerTransform,
) -> float:
    """Exact potential-value change V(D') − V(D) for nested distributions.

    For D ⊂ D' with difference mass Y (either direction),

        ΔV = E(T|D) N (M'/N' − M/N) + E(T|Y) (N' − N) M'/N'

    which follows from splitting E(T|D') over the shared and added mass.
    The same identity holds for reductions, with Y the removed mass.
    """
    if d.is_empty() and d_prime.is_empty():
        return 0.0
    if d.is_empty():
        return v_value(d_prime, model, t)
    if d_prime.is_empty():
        return -v_value(d, model, t)
    expansive = d_prime.n >= d.n
    base, other = (d, d_prime) if expansive else (d_prime, d)
    h = _difference_mean_t(base, other, t)
    n, n_p = d.n, d_prime.n
    m, m_p = potential(model, d), potential(model, d_prime)
    e = expected_t(d, t)
    return e * n * (m_p / n_p - m / n) + h * (n_p - n) * (m_p / n_p)


def delta_s(
    d: Distribution,
    d_prime: Distribution,
    model: ParticipationModel,
    t: ProducerTransform,
) -> ValueDelta:
    """Realized-value change S(D') − S(D), with the regime it fell in.

    Entirely below the crossing (N <= M at both ends) the change is just
    the added mass's value, E(T|Y)(N' − N); entirely at-or-above it equals
    delta_v; a shift that straddles the crossing is computed directly.
    """
    dv = delta_v(d, d_prime, model, t)
    n, n_p = d.n, d_prime.n
    m = potential(model, d)
    m_p = potential(model, d_prime)
    if n <= m and n_p <= m_p:
        expansive = n_p >= n
        base, other = (d, d_prime) if expansive else (d_prime, d)
        h = _difference_mean_t(base, other, t)
        return ValueDelta(h * (n_p - n), dv, Regime.BELOW_CROSSING)
    if n >= m and n_p >= m_p:
        return ValueDelta(dv, dv, Regime.AT_OR_ABOVE_CROSSING)
    ds = s_value(d_prime, model, t) - s_value(d, model, t)
    return ValueDelta(ds, dv, Regime.STRADDLES_CROSSING)


def xi(
    c: float,
    p: float,
    phi_r: float,
    d: Distribution,
    model: ParticipationModel,
    t: ProducerTransform,
) -> float:
    """Potential value of d extended by a share ``phi_r`` of point (c, p).

    Xi = [E + φ (T(p) − E)] * M(Q + φ (c − Q)) where E and Q are taken on
    d.  At φ = N_r/(N + N_r) this equals V(D + I_r) exactly, so ranking
    candidates by xi is ranking them by potential value after inclusion.
    """
    if not (0 <= phi_r < 1):
        raise ValueError(f"share must lie in [0, 1), got {phi_r!r}")
    if d.is_empty():
        raise EmptyDistributionError(
            "xi needs a non-empty base; score a seed by its own value instead"
        )
    e = expected_t(d, t)
    q = q_of(d)
    bracket = e + phi_r * (t.apply(p) - e)
    return bracket * model.m(q + phi_r * (c - q))


def upsilon(
    c: float,
    p: float,
    d: Distribution,
    model: ParticipationModel,
    t: ProducerTransform,
) -> float:
    """xi at the unit-increment share φ = 1/(N + 1).

    A weight-free candidate score: what one unit of (c, p) would do to the
    potential value.  Rankings by upsilon, xi at the true share, and
    delta_v agree (for unit weights) because all three are V(D + I_r) up
    to the constant V(D).
    """
    return xi(c, p, 1.0 / (d.n + 1.0), d, model, t)


def delta_v_of_increment(
    d: Distribution,
    c: float,
    p: float,
    weight: float,
    model: ParticipationModel,
    t: ProducerTransform,
) -> float:
    """ΔV for adding ``weight`` at (c, p): xi at the realized share − V(D)."""
    if d.is_empty():
        return t.apply(p) * model.m(c)
    phi = weight / (d.n + weight)
    return xi(c, p, phi, d, model, t) - v_value(d, model, t)
