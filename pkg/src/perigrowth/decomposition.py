"""The monoid-module skeleton of the graded growth set.

For a base vertex x0 and each subset S of quotient orbits there is a
monoid of (weight, lattice displacement) contributions of cycles supported
inside S, acting on the set of (budget, endpoint) pairs reachable by walks
whose quotient support is exactly S.  The graded growth set is the union
of these modules over all S, each finitely generated with generator
degrees bounded by W * (#S)^2 where W is the largest edge weight.  This
module constructs the generators, verifies the cover and the module
action by finite saturation, and performs desk-scale gradewise
intersections and multigraded Hilbert counts.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from ._dial import dial_distances
from .ball import graded_growth_slice
from .errors import GuardError, ResourceLimitError
from .periodic_graph import PeriodicVertex, QuotientGraph, Vector, translate
from .walks import chain_of_walk, enumerate_cycles, mu, support, walk_weight

SupportSet = frozenset[int]

DEFAULT_SATURATION_CAP = 5_000_000
DEFAULT_ORBIT_GUARD = 12


@dataclass(frozen=True)
class GradedMonoid:
    """Finitely generated submonoid of Z>=0 x Z^rank, given by generators."""

    rank: int
    generators: tuple[tuple[int, Vector], ...]

    def __post_init__(self):
        for deg, vec in self.generators:
            if deg < 0:
                raise ValueError(f"negative generator degree {deg}")
            if len(vec) != self.rank:
                raise ValueError("generator vector length does not match rank")

    def zero(self) -> tuple[int, Vector]:
        return (0, (0,) * self.rank)


@dataclass(frozen=True)
class GradedModuleGens:
    """Generators (degree, vertex) of the S-supported reachability module."""

    support: SupportSet
    degree_bound: int
    generators: tuple[tuple[int, PeriodicVertex], ...]


@dataclass(frozen=True)
class IntersectionCertificate:
    """Generators of an intersection, certified complete up to a degree.

    Soundness (every listed generator lies in all inputs) holds
    unconditionally; `complete` is True only when the caller supplied a
    bound argument making the truncation provably exhaustive.
    """

    generators: tuple
    verified_degree_bound: int
    complete: bool


@dataclass(frozen=True)
class CoverReport:
    ok: bool
    radius: int
    covered: int
    missing: tuple
    extra: tuple
    module_sizes: dict[SupportSet, int]


@dataclass(frozen=True)
class ActionReport:
    ok: bool
    support: SupportSet
    witness: tuple | None  # (monoid generator, module element, image) on failure


def all_support_sets(g: QuotientGraph) -> list[SupportSet]:
    """Every subset of orbits, sorted by size then lexicographic indices."""
    subsets = [
        frozenset(c)
        for r in range(g.num_orbits + 1)
        for c in itertools.combinations(range(g.num_orbits), r)
    ]
    return subsets


def build_MS(
    g: QuotientGraph, S: SupportSet, *, cycle_cap: int = 1_000_000
) -> GradedMonoid:
    """Monoid generated by cycles supported inside S, plus the degree step."""
    gens = {(1, (0,) * g.dim)}
    for cycle in enumerate_cycles(g, cap=cycle_cap):
        if support(g, cycle) <= S:
            gens.add((walk_weight(g, cycle), mu(g, chain_of_walk(cycle))))
    return GradedMonoid(g.dim, tuple(sorted(gens)))


def support_distances(
    g: QuotientGraph,
    x0: PeriodicVertex,
    budget: int,
    *,
    cap: int = DEFAULT_SATURATION_CAP,
) -> dict[tuple[PeriodicVertex, SupportSet], int]:
    """Minimal walk weight to each (endpoint, exact quotient support) pair.

    The length-0 walk at x0 has support {orbit of x0}, so that state sits
    at distance 0.
    """

    def successors(state):
        v, sup = state
        for eo in g.out_edges(v.orbit):
            dst = PeriodicVertex(
                eo.dst, tuple(a + b for a, b in zip(v.coord, eo.shift))
            )
            yield (dst, sup | {eo.dst}), eo.weight

    start = (x0, frozenset((x0.orbit,)))
    return dial_distances(
        [start],
        successors,
        budget,
        g.max_weight(),
        cap=cap,
        cap_what="support-graded ball",
    )


def module_degree_bound(g: QuotientGraph, S: SupportSet) -> int:
    """Generator degree bound W * (#S)^2 for the S-supported module."""
    return g.max_weight() * len(S) ** 2


def build_XS_generators(
    g: QuotientGraph,
    x0: PeriodicVertex,
    S: SupportSet,
    *,
    exhaustive: bool = False,
    budget: int | None = None,
    cap: int = DEFAULT_SATURATION_CAP,
) -> GradedModuleGens:
    """Generators of the module of S-supported reachability pairs.

    Default mode keeps one generator per endpoint, at the minimal weight of
    a walk with support exactly S; `exhaustive` restores the full truncation
    at the degree bound, which generates the same module.
    """
    bound = module_degree_bound(g, S)
    if budget is not None:
        bound = min(bound, budget)
    sdist = support_distances(g, x0, bound, cap=cap)
    gens = []
    for (v, sup), d in sdist.items():
        if sup != S:
            continue
        if exhaustive:
            gens.extend((i, v) for i in range(d, bound + 1))
        else:
            gens.append((d, v))
    return GradedModuleGens(S, bound, tuple(sorted(gens)))


def _check_degree_zero(generators, zero_payload) -> None:
    for deg, payload in generators:
        degree = sum(deg) if isinstance(deg, tuple) else deg
        if degree == 0 and payload != zero_payload:
            raise ValueError(
                "degree-0 generator with nonzero payload makes graded pieces infinite"
            )


def monoid_elements_upto(
    monoid: GradedMonoid, degree: int, *, cap: int = DEFAULT_SATURATION_CAP
) -> set[tuple[int, Vector]]:
    """All monoid elements of degree <= degree, by worklist saturation."""
    zero = monoid.zero()
    _check_degree_zero(monoid.generators, zero[1])
    seen = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for d, vec in frontier:
            for gd, gvec in monoid.generators:
                nd = d + gd
                if nd > degree:
                    continue
                el = (nd, tuple(a + b for a, b in zip(vec, gvec)))
                if el not in seen:
                    if len(seen) >= cap:
                        raise ResourceLimitError("monoid saturation cap exceeded")
                    seen.add(el)
                    nxt.append(el)
        frontier = nxt
    return seen


def module_elements_upto(
    monoid: GradedMonoid,
    module_gens,
    degree: int,
    *,
    cap: int = DEFAULT_SATURATION_CAP,
) -> set[tuple[int, PeriodicVertex]]:
    """All elements generator + monoid of degree <= degree."""
    _check_degree_zero(monoid.generators, monoid.zero()[1])
    seen = {(d, y) for d, y in module_gens if d <= degree}
    frontier = list(seen)
    while frontier:
        nxt = []
        for d, y in frontier:
            for gd, gvec in monoid.generators:
                nd = d + gd
                if nd > degree:
                    continue
                el = (nd, translate(y, gvec))
                if el not in seen:
                    if len(seen) >= cap:
                        raise ResourceLimitError("module saturation cap exceeded")
                    seen.add(el)
                    nxt.append(el)
        frontier = nxt
    return seen


def verify_cover(
    g: QuotientGraph,
    x0: PeriodicVertex,
    radius: int,
    *,
    exhaustive: bool = False,
    orbit_guard: int = DEFAULT_ORBIT_GUARD,
    threads: int = 1,
    cap: int = DEFAULT_SATURATION_CAP,
    cycle_cap: int = 1_000_000,
    max_witnesses: int = 10,
) -> CoverReport:
    """Check that the union of truncated modules equals the graded growth set.

    For every orbit subset S the module generators are truncated at the
    degree bound and saturated under the monoid action up to the radius;
    the union over all S must coincide with the set of pairs (i, y) with
    d(x0, y) <= i <= radius.
    """
    if g.num_orbits > orbit_guard:
        raise GuardError(
            f"{g.num_orbits} orbits exceed the subset guard of {orbit_guard}"
        )
    target = graded_growth_slice(g, x0, radius, cap=cap)
    sdist = support_distances(g, x0, radius, cap=cap)
    cycles = enumerate_cycles(g, cap=cycle_cap)
    cycle_data = [
        (support(g, c), walk_weight(g, c), mu(g, chain_of_walk(c))) for c in cycles
    ]
    subsets = all_support_sets(g)

    def truncated_module(S: SupportSet) -> set[tuple[int, PeriodicVertex]]:
        bound = min(module_degree_bound(g, S), radius)
        gens = []
        for (v, sup), d in sdist.items():
            if sup == S and d <= bound:
                if exhaustive:
                    gens.extend((i, v) for i in range(d, bound + 1))
                else:
                    gens.append((d, v))
        mgens = {(1, (0,) * g.dim)}
        mgens.update(
            (w, vec) for sup, w, vec in cycle_data if sup <= S
        )
        monoid = GradedMonoid(g.dim, tuple(sorted(mgens)))
        return module_elements_upto(monoid, gens, radius, cap=cap)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            pieces = list(pool.map(truncated_module, subsets))
    else:
        pieces = [truncated_module(S) for S in subsets]
    union: set[tuple[int, PeriodicVertex]] = set()
    sizes: dict[SupportSet, int] = {}
    for S, piece in zip(subsets, pieces):
        sizes[S] = len(piece)
        union |= piece
    missing = tuple(sorted(target - union))[:max_witnesses]
    extra = tuple(sorted(union - target))[:max_witnesses]
    return CoverReport(
        ok=not missing and not extra,
        radius=radius,
        covered=len(target),
        missing=missing,
        extra=extra,
        module_sizes=sizes,
    )


def verify_module_action(
    g: QuotientGraph,
    x0: PeriodicVertex,
    S: SupportSet,
    radius: int,
    *,
    monoid: GradedMonoid | None = None,
    cap: int = DEFAULT_SATURATION_CAP,
) -> ActionReport:
    """Check the monoid action maps the truncated module into itself.

    The module truncation is computed directly by walk search, so feeding a
    corrupted monoid (an extra bogus generator) must produce a witness.
    """
    if monoid is None:
        monoid = build_MS(g, S)
    sdist = support_distances(g, x0, radius, cap=cap)
    min_weight = {v: d for (v, sup), d in sdist.items() if sup == S}
    for gd, gvec in sorted(monoid.generators):
        for y, d in sorted(min_weight.items()):
            # (d, y) is the lowest-degree module element at y; acting on it
            # gives the strongest membership requirement
            nd = d + gd
            if nd > radius:
                continue
            image = translate(y, gvec)
            di = min_weight.get(image)
            if di is None or di > nd:
                return ActionReport(False, S, ((gd, gvec), (d, y), (nd, image)))
    return ActionReport(True, S, None)


def _sum_degree(deg) -> int:
    return sum(deg) if isinstance(deg, tuple) else deg


def _minimal_monoid_generators(elements, zero):
    elems = sorted(elements)
    elemset = set(elements)
    gens = []
    for e in elems:
        if e == zero:
            continue
        reducible = False
        for a in elems:
            if a == zero or a == e:
                continue
            db = e[0] - a[0]
            if db < 0:
                continue
            b = (db, tuple(x - y for x, y in zip(e[1], a[1])))
            if b != zero and b in elemset:
                reducible = True
                break
        if not reducible:
            gens.append(e)
    return tuple(gens)


def intersect_graded_monoids(
    monoids: list[GradedMonoid],
    degree: int,
    *,
    completeness_bound: int | None = None,
    cap: int = DEFAULT_SATURATION_CAP,
) -> IntersectionCertificate:
    """Generators of the intersection monoid, complete up to the degree.

    Every intersection element of degree <= degree is a sum of the listed
    generators; whether they generate the full infinite intersection is
    only claimed when the caller supplies a completeness bound with
    degree >= 2 * bound.
    """
    if not monoids:
        raise ValueError("need at least one monoid")
    rank = monoids[0].rank
    if any(m.rank != rank for m in monoids):
        raise ValueError("monoids have mismatched ambient ranks")
    common = monoid_elements_upto(monoids[0], degree, cap=cap)
    for m in monoids[1:]:
        common &= monoid_elements_upto(m, degree, cap=cap)
    zero = (0, (0,) * rank)
    gens = _minimal_monoid_generators(common, zero)
    complete = completeness_bound is not None and degree >= 2 * completeness_bound
    return IntersectionCertificate(gens, degree, complete)


def intersect_graded_modules(
    pairs: list[tuple[GradedMonoid, list[tuple[int, PeriodicVertex]]]],
    degree: int,
    *,
    completeness_bound: int | None = None,
    cap: int = DEFAULT_SATURATION_CAP,
) -> IntersectionCertificate:
    """Module generators of an intersection over the intersected monoid."""
    if not pairs:
        raise ValueError("need at least one (monoid, generators) pair")
    rank = pairs[0][0].rank
    common = module_elements_upto(pairs[0][0], pairs[0][1], degree, cap=cap)
    for monoid, gens in pairs[1:]:
        common &= module_elements_upto(monoid, gens, degree, cap=cap)
    monoid_common = monoid_elements_upto(pairs[0][0], degree, cap=cap)
    for monoid, _ in pairs[1:]:
        monoid_common &= monoid_elements_upto(monoid, degree, cap=cap)
    zero = (0, (0,) * rank)
    elemset = set(common)
    gens_out = []
    for e in sorted(common):
        reducible = False
        for m in monoid_common:
            if m == zero:
                continue
            db = e[0] - m[0]
            if db < 0:
                continue
            pre = (db, translate(e[1], tuple(-x for x in m[1])))
            if pre in elemset:
                reducible = True
                break
        if not reducible:
            gens_out.append(e)
    complete = completeness_bound is not None and degree >= 2 * completeness_bound
    return IntersectionCertificate(tuple(gens_out), degree, complete)


@dataclass(frozen=True)
class HilbertCountTable:
    """Exact multigraded element counts of a saturated module, over a box."""

    box: tuple[int, ...]
    values: dict[tuple[int, ...], int]


def hilbert_counts(
    monoid_gens: list[tuple[tuple[int, ...], tuple]],
    module_gens: list[tuple[tuple[int, ...], tuple]],
    box: tuple[int, ...],
    *,
    cap: int = DEFAULT_SATURATION_CAP,
) -> HilbertCountTable:
    """Count carriers per multidegree after saturating inside the box.

    Monoid generators are (degree vector, action) pairs where the action
    translates each carrier coordinate by a lattice vector; module
    generators carry tuples of vertices (or plain lattice vectors).
    """
    d = len(box)

    def act(carrier, action):
        out = []
        for y, vec in zip(carrier, action):
            if isinstance(y, PeriodicVertex):
                out.append(translate(y, vec))
            else:
                out.append(tuple(a + b for a, b in zip(y, vec)))
        return tuple(out)

    for degvec, action in monoid_gens:
        if len(degvec) != d:
            raise ValueError("monoid generator degree arity does not match box")
        if sum(degvec) == 0 and any(any(c != 0 for c in vec) for vec in action):
            raise ValueError(
                "degree-0 generator with nonzero action makes graded pieces infinite"
            )
    seen = {
        (tuple(degvec), carrier)
        for degvec, carrier in module_gens
        if all(a <= b for a, b in zip(degvec, box))
    }
    frontier = list(seen)
    while frontier:
        nxt = []
        for degvec, carrier in frontier:
            for gdeg, action in monoid_gens:
                ndeg = tuple(a + b for a, b in zip(degvec, gdeg))
                if any(a > b for a, b in zip(ndeg, box)):
                    continue
                el = (ndeg, act(carrier, action))
                if el not in seen:
                    if len(seen) >= cap:
                        raise ResourceLimitError("module saturation cap exceeded")
                    seen.add(el)
                    nxt.append(el)
        frontier = nxt
    values: dict[tuple[int, ...], int] = {}
    for degvec, _ in seen:
        values[degvec] = values.get(degvec, 0) + 1
    return HilbertCountTable(tuple(box), values)
