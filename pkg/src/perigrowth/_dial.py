"""Monotone label-setting over integer weights (Dial's bucket queue).

Generic over node type so the same search drives plain ball expansion and
the (vertex, support-mask) product searches used by the decomposition
machinery.  Buckets are indexed by distance mod (max weight + 1); with all
weights in [1, W] every pending label lives within that window.
"""

from __future__ import annotations

from typing import Callable, Hashable, Iterable

from .errors import ResourceLimitError

Node = Hashable


def dial_distances(
    starts: Iterable[Node],
    successors: Callable[[Node], Iterable[tuple[Node, int]]],
    budget: int,
    max_weight: int,
    *,
    cap: int = 10_000_000,
    cap_what: str = "search frontier",
) -> dict[Node, int]:
    """Exact distances d(start, v) <= budget for every reachable node v."""
    modulus = max_weight + 1 if max_weight > 0 else 1
    buckets: list[list[Node]] = [[] for _ in range(modulus)]
    dist: dict[Node, int] = {}
    for s in starts:
        dist[s] = 0
        buckets[0].append(s)
    for d in range(budget + 1):
        slot = buckets[d % modulus]
        if not slot:
            continue
        buckets[d % modulus] = []
        for node in slot:
            if dist[node] != d:
                continue  # superseded label
            for nb, w in successors(node):
                nd = d + w
                if nd > budget:
                    continue
                old = dist.get(nb)
                if old is None or nd < old:
                    if old is None and len(dist) >= cap:
                        raise ResourceLimitError(
                            f"{cap_what} exceeded {cap} nodes; raise the cap"
                        )
                    dist[nb] = nd
                    buckets[nd % modulus].append(nb)
    return dist
