"""Discrete frequency distributions over scored content points.

A content point carries a consumer value ``c`` (utility per unit, already
time-normalized) and a raw producer value ``p``.  A distribution assigns a
non-negative volume (weight) to each point id.  Everything downstream —
participation curves, value functions, the greedy optimizer — is built on
the handful of pure operations in this module.

Distributions are immutable: every operation returns a new value.  Totals
(``n``) and the volume-weighted mean consumer value (``q``) are computed
eagerly with compensated summation so long build sequences do not drift.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator

#: weights within this absolute tolerance of zero are treated as removed
DROP_TOLERANCE = 1e-9


class DistributionError(ValueError):
    """Base class for errors raised by distribution operations."""


class EmptyDistributionError(DistributionError):
    """An operation that needs volume was handed an empty distribution."""


class SubdistributionError(DistributionError):
    """Attempted to remove more weight than a distribution holds."""


class TableLookupError(DistributionError):
    """A table transform has no entry for a requested producer value."""


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class Point:
    """One unit-type of content: an id plus its (c, p) scores.

    Negative and zero scores are legal; content can be actively unpleasant
    for the consumer or worthless to the producer.
    """

    id: str
    c: float
    p: float

    def __post_init__(self) -> None:
        if not isinstance(self.id, str) or not self.id:
            raise ValueError("point id must be a non-empty string")
        object.__setattr__(self, "c", _require_finite("c", self.c))
        object.__setattr__(self, "p", _require_finite("p", self.p))


@dataclass(frozen=True)
class PointIncrement:
    """A strictly positive slab of weight at a single point."""

    point: Point
    weight: float

    def __post_init__(self) -> None:
        w = _require_finite("weight", self.weight)
        if w <= 0:
            raise ValueError(f"increment weight must be > 0, got {w!r}")
        object.__setattr__(self, "weight", w)

    def as_distribution(self) -> "Distribution":
        return Distribution([(self.point, self.weight)])


@dataclass(frozen=True)
class ProducerTransform:
    """Maps raw producer values p onto the scale used by the value functions.

    Kinds:

    * ``identity`` — T(p) = p.
    * ``affine`` — T(p) = a*p + b.
    * ``table`` — an explicit finite map p -> T(p); total on the instance's
      p values by contract, so a missing entry is an error rather than an
      interpolation.

    ``is_monotone`` reports whether T is non-decreasing; checks that only
    hold for monotone transforms are skipped when it is False.
    """

    kind: str
    a: float = 1.0
    b: float = 0.0
    table: tuple[tuple[float, float], ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in ("identity", "affine", "table"):
            raise ValueError(f"unknown transform kind {self.kind!r}")
        object.__setattr__(self, "a", _require_finite("a", self.a))
        object.__setattr__(self, "b", _require_finite("b", self.b))
        if self.kind == "table":
            if not self.table:
                raise ValueError("table transform needs at least one entry")
            seen: dict[float, float] = {}
            for p, t in self.table:
                p = _require_finite("table p", p)
                t = _require_finite("table T(p)", t)
                if p in seen and seen[p] != t:
                    raise ValueError(f"conflicting table entries for p={p!r}")
                seen[p] = t
            object.__setattr__(
                self, "table", tuple(sorted(seen.items()))
            )

    @staticmethod
    def identity() -> "ProducerTransform":
        return ProducerTransform("identity")

    @staticmethod
    def affine(a: float, b: float) -> "ProducerTransform":
        return ProducerTransform("affine", a=a, b=b)

    @staticmethod
    def from_table(entries: Iterable[tuple[float, float]]) -> "ProducerTransform":
        return ProducerTransform("table", table=tuple(entries))

    @property
    def is_monotone(self) -> bool:
        if self.kind == "identity":
            return True
        if self.kind == "affine":
            return self.a >= 0
        values = [t for _, t in self.table]
        return all(b >= a for a, b in zip(values, values[1:]))

    def apply(self, p: float) -> float:
        if self.kind == "identity":
            return float(p)
        if self.kind == "affine":
            return self.a * p + self.b
        for key, value in self.table:
            if key == p:
                return value
        raise TableLookupError(f"table transform has no entry for p={p!r}")


class Distribution:
    """An immutable map from point id to (point, weight).

    Insertion order is preserved, which — together with the deterministic
    tie-breaks used by the sequence builder — makes every downstream trace
    reproducible byte-for-byte.
    """

    __slots__ = ("_entries", "_n", "_q_numerator")

    def __init__(self, entries: Iterable[tuple[Point, float]] = ()):
        merged: dict[str, tuple[Point, float]] = {}
        for point, weight in entries:
            weight = _require_finite(f"weight of {point.id!r}", weight)
            if weight < 0:
                raise ValueError(f"negative weight for point {point.id!r}")
            if point.id in merged:
                prev_point, prev_weight = merged[point.id]
                if prev_point.c != point.c or prev_point.p != point.p:
                    raise ValueError(
                        f"point id {point.id!r} reused with different scores"
                    )
                merged[point.id] = (point, prev_weight + weight)
            else:
                merged[point.id] = (point, weight)
        self._entries = {
            pid: (pt, w) for pid, (pt, w) in merged.items() if w > DROP_TOLERANCE
        }
        self._n = math.fsum(w for _, w in self._entries.values())
        self._q_numerator = math.fsum(
            w * pt.c for pt, w in self._entries.values()
        )

    # -- basic views ------------------------------------------------------

    @property
    def n(self) -> float:
        """Total volume N."""
        return self._n

    @property
    def q(self) -> float:
        """Volume-weighted mean consumer value Q. Undefined when empty."""
        if not self._entries:
            raise EmptyDistributionError("Q is undefined on an empty distribution")
        return self._q_numerator / self._n

    def is_empty(self) -> bool:
        return not self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, point_id: str) -> bool:
        return point_id in self._entries

    def __iter__(self) -> Iterator[tuple[Point, float]]:
        return iter(self._entries.values())

    def items(self) -> Iterator[tuple[Point, float]]:
        return iter(self._entries.values())

    def ids(self) -> tuple[str, ...]:
        return tuple(self._entries)

    def weight_of(self, point_id: str) -> float:
        entry = self._entries.get(point_id)
        return entry[1] if entry is not None else 0.0

    def point_of(self, point_id: str) -> Point:
        return self._entries[point_id][0]

    def phi(self, point_id: str) -> float:
        """The weight share φ_r = N_r / N of one point."""
        if self.is_empty():
            raise EmptyDistributionError("no shares on an empty distribution")
        return self.weight_of(point_id) / self._n

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Distribution):
            return NotImplemented
        if set(self._entries) != set(other._entries):
            return False
        return all(
            self._entries[k] == other._entries[k] for k in self._entries
        )

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        inner = ", ".join(
            f"{pt.id}:{w:g}" for pt, w in self._entries.values()
        )
        return f"Distribution({{{inner}}}, n={self._n:g})"


#: the canonical empty distribution, legal only as a build seed
EMPTY = Distribution()


def combine(d1: Distribution, d2: Distribution) -> Distribution:
    """Frequency-additive combination: weights add point-wise."""
    return Distribution(list(d1.items()) + list(d2.items()))


def q_of(d: Distribution) -> float:
    """Expected consumer value Q(D) = Σ φ_r c_r."""
    return d.q


def expected_t(d: Distribution, t: ProducerTransform) -> float:
    """Expected transformed producer value E(T|D) = Σ φ_r T(p_r).

    Applied to an increment set this is the increment mean that the
    incremental value formulas call for.
    """
    if d.is_empty():
        raise EmptyDistributionError(
            "expected producer value is undefined on an empty distribution"
        )
    return math.fsum(w * t.apply(pt.p) for pt, w in d.items()) / d.n


def apply_increment(d: Distribution, inc: PointIncrement) -> Distribution:
    """Return d with inc.weight added at inc.point (expansive shift)."""
    return Distribution(list(d.items()) + [(inc.point, inc.weight)])


def remove_subdistribution(d: Distribution, y: Distribution) -> Distribution:
    """Return d − y.  y must be point-wise within d (a true carve)."""
    remaining: list[tuple[Point, float]] = []
    for point, weight in d.items():
        removed = y.weight_of(point.id)
        if removed > weight + DROP_TOLERANCE:
            raise SubdistributionError(
                f"cannot remove {removed!r} from {weight!r} at point {point.id!r}"
            )
        left = weight - removed
        if left > DROP_TOLERANCE:
            remaining.append((point, left))
    for point, weight in y.items():
        if point.id not in d and weight > DROP_TOLERANCE:
            raise SubdistributionError(
                f"point {point.id!r} is not part of the distribution"
            )
    return Distribution(remaining)
