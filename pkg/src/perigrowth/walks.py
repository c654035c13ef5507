"""Walk combinatorics on the quotient graph.

Cycles here are closed walks whose visited vertices are pairwise distinct;
rotations of the same cycle are collapsed to the lexicographically least
edge-id rotation, which is safe because every quantity we derive from a
cycle (weight, net lattice displacement) is rotation invariant.

The key map is `mu`: it sends the 1-chain of a closed walk in the quotient
to the net lattice translation picked up by any lift of that walk.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .errors import ResourceLimitError
from .periodic_graph import GammaEdge, PeriodicVertex, QuotientGraph, Vector

EdgeChain = dict[int, int]


@dataclass(frozen=True)
class QWalk:
    """A walk in the quotient graph, as a sequence of edge-orbit ids.

    A length-0 walk carries its base orbit explicitly; by convention its
    support is the singleton of that orbit.
    """

    edges: tuple[int, ...]
    base: int | None = None

    def __post_init__(self):
        if not self.edges and self.base is None:
            raise ValueError("length-0 walk needs a base orbit")

    def __len__(self) -> int:
        return len(self.edges)


@dataclass(frozen=True, order=True)
class Cycle:
    """A simple directed cycle, stored in its least edge-id rotation."""

    edges: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.edges)


def walk_orbits(g: QuotientGraph, p: QWalk | Cycle) -> list[int]:
    """Visited orbit sequence s(e1), t(e1), ..., t(el); validates composability."""
    edges = p.edges
    if not edges:
        return [p.base]
    orbits = [g.edges[edges[0]].src]
    for eid in edges:
        e = g.edges[eid]
        if e.src != orbits[-1]:
            raise ValueError(
                f"edge {eid} starts at orbit {e.src}, walk is at {orbits[-1]}"
            )
        orbits.append(e.dst)
    return orbits


def walk_weight(g: QuotientGraph, p: QWalk | Cycle) -> int:
    return sum(g.edges[eid].weight for eid in p.edges)


def support(g: QuotientGraph, p: QWalk | Cycle) -> frozenset[int]:
    """Set of orbits touched by the walk; {base} for a length-0 walk."""
    return frozenset(walk_orbits(g, p))


def chain_of_walk(p: QWalk | Cycle) -> EdgeChain:
    """Edge multiplicities of the walk as a 1-chain."""
    return dict(Counter(p.edges))


def add_chains(a: EdgeChain, b: EdgeChain) -> EdgeChain:
    out = Counter(a)
    out.update(b)
    return {k: v for k, v in out.items() if v != 0}


def _canonical_rotation(edges: tuple[int, ...]) -> tuple[int, ...]:
    rotations = [edges[i:] + edges[:i] for i in range(len(edges))]
    return min(rotations)


def make_cycle(g: QuotientGraph, edges: tuple[int, ...]) -> Cycle:
    """Validate the cycle conditions and canonicalize the rotation."""
    orbits = walk_orbits(g, QWalk(tuple(edges)))
    if orbits[0] != orbits[-1]:
        raise ValueError("not closed")
    targets = orbits[1:]
    if len(set(targets)) != len(targets):
        raise ValueError("visited vertices are not distinct")
    return Cycle(_canonical_rotation(tuple(edges)))


def enumerate_cycles(g: QuotientGraph, *, cap: int = 1_000_000) -> list[Cycle]:
    """All simple directed cycles of the quotient, deduplicated and sorted.

    Depth-first search rooted at each orbit in turn, visiting only orbits
    of larger index, so every cycle is discovered exactly once at its
    minimal orbit.  Loops and parallel edges give distinct cycles.
    """
    found: set[Cycle] = set()
    n = g.num_orbits
    for start in range(n):
        # stack entries: (current orbit, path of edge ids, visited orbit set)
        stack = [(start, (), frozenset((start,)))]
        while stack:
            orbit, path, visited = stack.pop()
            for eo in g.out_edges(orbit):
                if eo.dst == start:
                    found.add(Cycle(_canonical_rotation(path + (eo.id,))))
                    if len(found) > cap:
                        raise ResourceLimitError(
                            f"more than {cap} cycles; raise the cycle cap"
                        )
                elif eo.dst > start and eo.dst not in visited:
                    stack.append((eo.dst, path + (eo.id,), visited | {eo.dst}))
    return sorted(found, key=lambda c: (len(c.edges), c.edges))


def _boundary(g: QuotientGraph, c: EdgeChain) -> dict[int, int]:
    bnd: Counter = Counter()
    for eid, mult in c.items():
        e = g.edges[eid]
        bnd[e.dst] += mult
        bnd[e.src] -= mult
    return {k: v for k, v in bnd.items() if v != 0}


def mu(g: QuotientGraph, c: EdgeChain) -> Vector:
    """Net lattice displacement of a homology chain.

    For the chain of any closed walk this equals the lattice difference
    between the endpoints of any lift of that walk.
    """
    bad = _boundary(g, c)
    if bad:
        raise ValueError(f"not a homology class: nonzero boundary at orbits {sorted(bad)}")
    total = [0] * g.dim
    for eid, mult in c.items():
        shift = g.edges[eid].shift
        for i in range(g.dim):
            total[i] += mult * shift[i]
    return tuple(total)


@dataclass(frozen=True)
class GammaWalk:
    """A lifted walk in the infinite cover."""

    start: PeriodicVertex
    edges: tuple[GammaEdge, ...]
    end: PeriodicVertex


def lift_walk(g: QuotientGraph, q: QWalk, x0: PeriodicVertex) -> GammaWalk:
    """The unique lift of q starting at x0."""
    orbits = walk_orbits(g, q)
    if orbits[0] != x0.orbit:
        raise ValueError(
            f"walk starts at orbit {orbits[0]}, lift base has orbit {x0.orbit}"
        )
    coord = x0.coord
    lifted = []
    for eid in q.edges:
        e = g.edges[eid]
        lifted.append(GammaEdge(eid, coord))
        coord = tuple(a + b for a, b in zip(coord, e.shift))
    end = PeriodicVertex(orbits[-1], coord)
    return GammaWalk(x0, tuple(lifted), end)


def is_walkable(g: QuotientGraph, q0: QWalk, cycles: list[Cycle]) -> bool:
    """Whether the path and cycles assemble into one walk of the quotient.

    Works greedily: attach any remaining cycle whose support meets the
    accumulated support.  Greedy suffices because attachability only grows
    with the accumulated support.
    """
    acc = support(g, q0)
    remaining = list(cycles)
    progress = True
    while remaining and progress:
        progress = False
        for i, c in enumerate(remaining):
            if support(g, c) & acc:
                acc |= support(g, c)
                remaining.pop(i)
                progress = True
                break
    return not remaining


def decompose_walk(g: QuotientGraph, q: QWalk) -> tuple[QWalk, list[Cycle]]:
    """Split a walk into a path plus simple cycles.

    Scans the walk and pops a cycle whenever the current endpoint revisits
    an orbit still on the open path.  The result satisfies chain equality,
    support equality and walkability with respect to q.
    """
    orbits = walk_orbits(g, q)
    path_orbits = [orbits[0]]
    path_edges: list[int] = []
    cycles: list[Cycle] = []
    for eid in q.edges:
        dst = g.edges[eid].dst
        if dst in path_orbits:
            at = path_orbits.index(dst)
            cycle_edges = tuple(path_edges[at:]) + (eid,)
            cycles.append(Cycle(_canonical_rotation(cycle_edges)))
            del path_edges[at:]
            del path_orbits[at + 1 :]
        else:
            path_edges.append(eid)
            path_orbits.append(dst)
    q0 = QWalk(tuple(path_edges), base=path_orbits[0] if not path_edges else None)
    return q0, cycles
