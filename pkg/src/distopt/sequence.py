"""Greedy construction of distributions, one best increment at a time.

The builder adds whichever candidate increment maximizes the potential
value of the result.  Ties break deterministically: higher consumer value,
then higher transformed producer value, then smaller id.  Probing past a
crossing accumulates increments until the marginal-participation slope
relative to the entry distribution either leaves (0, 1) or stops
improving; the caller classifies what the resulting block means.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .core import (
    Distribution,
    Point,
    PointIncrement,
    ProducerTransform,
    apply_increment,
    expected_t,
    q_of,
    remove_subdistribution,
    DROP_TOLERANCE,
)
from .participation import ParticipationModel, kappa, potential
from .valuation import delta_v_of_increment

#: a kappa sequence must rise by more than this to count as still improving
KAPPA_IMPROVEMENT_TOL = 1e-12

HIGHEST_VALUE = "highest_value"
EXPLICIT = "explicit"
ALL_CANDIDATES = "all"
TOP_K = "top_k"
FULL_POINT = "full_point"
UNIT_CHUNKS = "unit_chunks"


class ExhaustedPoolError(ValueError):
    """No candidate weight remains to extend the distribution with."""


@dataclass(frozen=True)
class SequenceConfig:
    """Policies for seeding, candidate filtering, and increment sizing.

    ``seed_policy`` decides how an empty distribution starts: pick the
    best-scoring point, or install an explicit id list first.
    ``candidate_policy`` optionally prunes scoring to the top k candidates
    by a cheap additive proxy before exact scoring.  ``weight_policy``
    controls whether increments take a point's full remaining weight or
    fixed-size chunks of it.
    """

    seed_policy: str = HIGHEST_VALUE
    seed_ids: tuple[str, ...] = ()
    candidate_policy: str = ALL_CANDIDATES
    top_k: int | None = None
    weight_policy: str = FULL_POINT
    chunk: float | None = None

    def __post_init__(self) -> None:
        if self.seed_policy not in (HIGHEST_VALUE, EXPLICIT):
            raise ValueError(f"unknown seed policy {self.seed_policy!r}")
        if self.seed_policy == EXPLICIT and not self.seed_ids:
            raise ValueError("explicit seeding needs at least one id")
        if self.candidate_policy not in (ALL_CANDIDATES, TOP_K):
            raise ValueError(
                f"unknown candidate policy {self.candidate_policy!r}"
            )
        if self.candidate_policy == TOP_K:
            if self.top_k is None or self.top_k < 1:
                raise ValueError("top-k filtering needs k >= 1")
        if self.weight_policy not in (FULL_POINT, UNIT_CHUNKS):
            raise ValueError(f"unknown weight policy {self.weight_policy!r}")
        if self.weight_policy == UNIT_CHUNKS:
            if self.chunk is None or not (self.chunk > 0):
                raise ValueError("chunked increments need a chunk size > 0")


@dataclass(frozen=True)
class SequenceStep:
    """One accepted increment and the state just after it."""

    index: int
    added: PointIncrement
    n_after: float
    q_after: float
    m_after: float
    step_delta_v: float

    @property
    def w_after(self) -> float:
        return min(self.n_after, self.m_after)


@dataclass(frozen=True)
class SequenceTrace:
    steps: tuple[SequenceStep, ...] = ()

    def extended(self, step: SequenceStep) -> "SequenceTrace":
        return SequenceTrace(self.steps + (step,))

    @property
    def is_monotone_decreasing(self) -> bool:
        """Mean consumer value never rises along the build (within fp tol)."""
        qs = [s.q_after for s in self.steps]
        return all(b <= a + 1e-12 * max(1.0, abs(a)) for a, b in zip(qs, qs[1:]))

    @property
    def is_generally_decreasing(self) -> bool:
        """Starts consumer-attractive and never beats the opening value."""
        if not self.steps:
            return False
        first = self.steps[0]
        if first.m_after <= first.n_after:
            return False
        top = first.q_after
        return all(
            s.q_after <= top + 1e-12 * max(1.0, abs(top)) for s in self.steps
        )


@dataclass(frozen=True)
class ProbeResult:
    """What accumulating past an entry distribution produced.

    ``kappa`` is the marginal-participation slope of the whole accumulated
    block measured against the entry distribution (None when the pool was
    empty at entry).  ``exhausted`` reports that the pool ran out before
    the slope left (0, 1) or stopped improving.
    """

    distribution: Distribution
    kappa: float | None
    exhausted: bool
    increments: tuple[PointIncrement, ...] = ()
    kappas: tuple[float, ...] = ()

    @property
    def block(self) -> Distribution:
        return Distribution(
            [(inc.point, inc.weight) for inc in self.increments]
        )


def remaining_pool(
    d: Distribution, d_all: Distribution
) -> list[tuple[Point, float]]:
    """Candidate points and the weight each still has available."""
    pool: list[tuple[Point, float]] = []
    for point, total in d_all.items():
        left = total - d.weight_of(point.id)
        if left > DROP_TOLERANCE:
            pool.append((point, left))
    return pool


def _tie_key(point: Point, t: ProducerTransform) -> tuple[float, float, str]:
    return (-point.c, -t.apply(point.p), point.id)


def _increment_weight(cfg: SequenceConfig, available: float) -> float:
    if cfg.weight_policy == UNIT_CHUNKS:
        return min(cfg.chunk, available)
    return available


def best_increment(
    d: Distribution,
    d_all: Distribution,
    cfg: SequenceConfig,
    model: ParticipationModel,
    t: ProducerTransform,
) -> PointIncrement:
    """The value-maximizing next increment from the remaining pool.

    On an empty base the score of a candidate is the potential value of
    its own singleton, T(p) * M(c).  Otherwise candidates are scored by
    the potential value after inclusion at their realized share.
    """
    pool = remaining_pool(d, d_all)
    if not pool:
        raise ExhaustedPoolError("no candidate weight remains")
    if cfg.candidate_policy == TOP_K and len(pool) > cfg.top_k and not d.is_empty():
        e = expected_t(d, t)
        q = q_of(d)
        if e > 0 and q > 0:
            pool.sort(
                key=lambda cw: (
                    -(cw[0].c / q + t.apply(cw[0].p) / e),
                    _tie_key(cw[0], t),
                )
            )
            pool = pool[: cfg.top_k]

    best: tuple[float, tuple[float, float, str]] | None = None
    best_inc: PointIncrement | None = None
    for point, available in pool:
        weight = _increment_weight(cfg, available)
        score = delta_v_of_increment(d, point.c, point.p, weight, model, t)
        key = (-score, _tie_key(point, t))
        if best is None or key < best:
            best = key
            best_inc = PointIncrement(point, weight)
    assert best_inc is not None
    return best_inc


def seed_distribution(
    d_all: Distribution,
    cfg: SequenceConfig,
    model: ParticipationModel,
    t: ProducerTransform,
) -> list[PointIncrement]:
    """Increments that install the configured seed into an empty base."""
    if cfg.seed_policy == EXPLICIT:
        incs = []
        for pid in cfg.seed_ids:
            if pid not in d_all:
                raise KeyError(f"seed id {pid!r} is not in the pool")
            incs.append(PointIncrement(d_all.point_of(pid), d_all.weight_of(pid)))
        return incs
    return [best_increment(Distribution(), d_all, cfg, model, t)]


def best_next_in_sequence(
    d: Distribution,
    d_all: Distribution,
    cfg: SequenceConfig,
    model: ParticipationModel,
    t: ProducerTransform,
) -> ProbeResult:
    """Accumulate best increments past ``d`` until the block slope settles.

    Stops at the first accumulated block whose slope versus the entry
    distribution leaves the open interval (0, 1) — such a block is a
    complete candidate for the caller to classify — or at the first block
    whose slope fails to improve on the previous one while still inside
    (0, 1).  Runs the pool dry otherwise and says so.
    """
    current = d
    increments: list[PointIncrement] = []
    kappas: list[float] = []
    prev_kappa: float | None = None
    while True:
        try:
            inc = best_increment(current, d_all, cfg, model, t)
        except ExhaustedPoolError:
            return ProbeResult(
                current,
                prev_kappa,
                True,
                tuple(increments),
                tuple(kappas),
            )
        current = apply_increment(current, inc)
        k = kappa(model, d, current)
        increments.append(inc)
        kappas.append(k)
        if k >= 1 or k <= 0:
            return ProbeResult(
                current, k, False, tuple(increments), tuple(kappas)
            )
        if prev_kappa is not None and k <= prev_kappa + KAPPA_IMPROVEMENT_TOL:
            return ProbeResult(
                current, k, False, tuple(increments), tuple(kappas)
            )
        prev_kappa = k


def order_prefers(
    first: tuple[Point, float],
    second: tuple[Point, float],
    d_a: Distribution,
    model: ParticipationModel,
    t: ProducerTransform,
) -> bool:
    """Would the greedy order at base ``d_a`` pick ``first`` over ``second``?

    Compares the post-inclusion potential values directly.  Undefined when
    the base has non-positive mean producer value, since the relative
    bracket comparison loses its meaning there.
    """
    if d_a.is_empty():
        raise ValueError("ordering needs a non-empty base distribution")
    e_a = expected_t(d_a, t)
    if e_a <= 0:
        raise ValueError(
            "ordering is undefined on a base with non-positive mean producer value"
        )
    scores = []
    for point, weight in (first, second):
        phi = weight / (d_a.n + weight)
        bracket = 1.0 + phi * (t.apply(point.p) / e_a - 1.0)
        grown = apply_increment(d_a, PointIncrement(point, weight))
        scores.append(bracket * potential(model, grown))
    return scores[0] > scores[1]


def is_viable(
    candidate: PointIncrement,
    at: Distribution,
    trace: SequenceTrace,
    model: ParticipationModel,
    t: ProducerTransform,
) -> bool:
    """Could ``candidate`` not have displaced the last accepted increment?

    A candidate reaching the crossing distribution legitimately must not
    have been preferable one step earlier.  The test bounds the
    candidate's earlier marginal-participation slope by the ordering
    limit computed from realized quantities; candidates at or under the
    limit are viable.  With no earlier step to compare against, viability
    holds trivially.  Degenerate bases (non-positive mean producer value
    at either measuring point) never exclude.
    """
    if not trace.steps:
        return True
    last = trace.steps[-1].added
    try:
        d_a = remove_subdistribution(at, last.as_distribution())
    except Exception:
        return True
    if d_a.is_empty():
        return True
    n_star = at.n
    if n_star <= 0:
        return True
    e_star = expected_t(at, t)
    e_a = expected_t(d_a, t)
    if e_star <= 0 or e_a <= 0:
        return True
    n_r1 = last.weight / n_star
    n_r2 = candidate.weight / n_star
    tp1 = t.apply(last.point.p) / e_a
    tp2 = t.apply(candidate.point.p) / e_star
    denom = 1.0 - n_r1 + tp2 * n_r2
    if denom <= 0:
        return True
    limit = (
        (1.0 - n_r1 + n_r2) * (tp1 - 1.0) * n_r1 / n_r2 + (1.0 - tp2)
    ) / denom
    kappa_a = (
        potential(model, apply_increment(d_a, candidate)) - potential(model, d_a)
    ) / candidate.weight
    # the limit is stated on the volume-normalized scale; kappa is scale-free
    return kappa_a <= limit + 1e-12


def greedy_sweep(
    d_all: Distribution,
    cfg: SequenceConfig,
    model: ParticipationModel,
    t: ProducerTransform,
    max_steps: int | None = None,
) -> SequenceTrace:
    """Run the plain greedy build to pool exhaustion and record each step.

    No stopping rule, no probes: this is the raw supply/participation
    curve that the optimizer's stopping logic carves a prefix out of.
    """
    trace = SequenceTrace()
    d = Distribution()
    steps = 0
    limit = max_steps if max_steps is not None else 10 * max(1, len(d_all))
    while steps < limit:
        try:
            if d.is_empty():
                incs = seed_distribution(d_all, cfg, model, t)
            else:
                incs = [best_increment(d, d_all, cfg, model, t)]
        except ExhaustedPoolError:
            break
        for inc in incs:
            dv = delta_v_of_increment(
                d, inc.point.c, inc.point.p, inc.weight, model, t
            )
            d = apply_increment(d, inc)
            trace = trace.extended(
                SequenceStep(
                    len(trace.steps),
                    inc,
                    d.n,
                    q_of(d),
                    potential(model, d),
                    dv,
                )
            )
        steps += 1
        if not remaining_pool(d, d_all):
            break
    return trace
