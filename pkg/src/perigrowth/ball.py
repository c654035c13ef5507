"""Weighted ball expansion in the infinite cover.

Distances are exact shortest walk weights from a base vertex; everything
else here (growth sequences, the graded growth set, multivariate relative
counts) is a reindexing of one distance map.  Unreachable vertices are
simply absent, matching the convention that an infinite distance
contributes nothing to any series.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from ._dial import dial_distances
from .errors import CoverageError
from .periodic_graph import PeriodicVertex, QuotientGraph, out_neighbors

DEFAULT_BALL_CAP = 10_000_000


@dataclass(frozen=True)
class DistanceMap:
    """All vertices within weighted distance `radius` of `base`."""

    base: PeriodicVertex
    radius: int
    entries: dict[PeriodicVertex, int]

    def __contains__(self, v: PeriodicVertex) -> bool:
        return v in self.entries

    def distance(self, v: PeriodicVertex) -> int | None:
        return self.entries.get(v)


@dataclass(frozen=True)
class GrowthSequence:
    base: PeriodicVertex
    terms: tuple[int, ...]


@dataclass(frozen=True)
class RelativeCountTable:
    """Exact per-multidegree counts of a tuple set, at and below each degree.

    counts_exact[a] counts tuples whose coordinate distances equal a
    componentwise; counts_cumulative[a] counts those bounded by a.
    """

    arity: int
    box: tuple[int, ...]
    counts_exact: dict[tuple[int, ...], int]
    counts_cumulative: dict[tuple[int, ...], int]


def distances_upto(
    g: QuotientGraph,
    x0: PeriodicVertex,
    radius: int,
    *,
    cap: int = DEFAULT_BALL_CAP,
) -> DistanceMap:
    """Exact distances from x0 to every vertex within the given radius."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")

    def successors(v: PeriodicVertex):
        return ((dst, w) for _, dst, w in out_neighbors(g, v))

    dist = dial_distances(
        [x0], successors, radius, g.max_weight(), cap=cap, cap_what="ball size"
    )
    return DistanceMap(x0, radius, dist)


def growth_sequence(
    g: QuotientGraph,
    x0: PeriodicVertex,
    radius: int,
    *,
    cap: int = DEFAULT_BALL_CAP,
) -> GrowthSequence:
    """Number of vertices at each exact distance 0..radius."""
    dm = distances_upto(g, x0, radius, cap=cap)
    terms = [0] * (radius + 1)
    for d in dm.entries.values():
        terms[d] += 1
    return GrowthSequence(x0, tuple(terms))


def graded_growth_slice(
    g: QuotientGraph,
    x0: PeriodicVertex,
    radius: int,
    *,
    cap: int = DEFAULT_BALL_CAP,
) -> set[tuple[int, PeriodicVertex]]:
    """The pairs (i, y) with d(x0, y) <= i <= radius."""
    dm = distances_upto(g, x0, radius, cap=cap)
    return {
        (i, y)
        for y, d in dm.entries.items()
        for i in range(d, radius + 1)
    }


def relative_counts(
    g: QuotientGraph,
    x0: PeriodicVertex,
    tuples: list[tuple[PeriodicVertex, ...]],
    box: tuple[int, ...],
    *,
    cap: int = DEFAULT_BALL_CAP,
    distance_map: DistanceMap | None = None,
) -> RelativeCountTable:
    """Count tuples by per-coordinate distance over the whole box.

    The supplied enumeration must be exactly the within-ball truncation of
    the counted set: any coordinate outside the radius-max(box) ball is a
    producer bug and raises rather than silently truncating.
    """
    if not box:
        raise ValueError("box must have at least one coordinate")
    arity = len(box)
    if any(b < 0 for b in box):
        raise ValueError("box bounds must be nonnegative")
    radius = max(box)
    dm = distance_map
    if dm is None or dm.radius < radius:
        dm = distances_upto(g, x0, radius, cap=cap)
    exact: dict[tuple[int, ...], int] = {}
    for tup in tuples:
        if len(tup) != arity:
            raise ValueError(f"tuple arity {len(tup)} does not match box arity {arity}")
        degs = []
        for y in tup:
            d = dm.distance(y)
            if d is None:
                raise CoverageError(
                    f"tuple coordinate {y} lies outside the radius-{dm.radius} ball"
                )
            degs.append(d)
        key = tuple(degs)
        if all(a <= b for a, b in zip(key, box)):
            exact[key] = exact.get(key, 0) + 1
    # cumulative counts via d-dimensional prefix sums, one axis at a time
    cumulative: dict[tuple[int, ...], int] = {}
    for a in itertools.product(*(range(b + 1) for b in box)):
        cumulative[a] = exact.get(a, 0)
    for axis in range(arity):
        for a in itertools.product(*(range(b + 1) for b in box)):
            if a[axis] > 0:
                prev = a[:axis] + (a[axis] - 1,) + a[axis + 1 :]
                cumulative[a] += cumulative[prev]
    return RelativeCountTable(arity, tuple(box), exact, cumulative)
