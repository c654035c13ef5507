"""Virtually abelian groups as explicit finite extensions of Z^n.

A group is given by a finite part (multiplication table), an action of the
finite part on the lattice by integer matrices, and an integral 2-cocycle
(zero for split extensions).  Elements are (lattice vector, finite index)
pairs multiplied by the extension formula; the right Cayley graph of a
weighted generating set is a periodic graph whose ball distances realize
the weighted word length, which is what all growth counting runs on.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

from .ball import (
    DEFAULT_BALL_CAP,
    DistanceMap,
    RelativeCountTable,
    distances_upto,
    relative_counts,
)
from .errors import (
    CoverageError,
    DisjointnessError,
    FormatError,
    GuardError,
    InputError,
    ResourceLimitError,
)
from .periodic_graph import EdgeOrbit, PeriodicVertex, QuotientGraph, Vector
from .walks import enumerate_cycles, walk_weight

Matrix = tuple[tuple[int, ...], ...]

DEFAULT_ORDER_CAP = 64

# Steinitz rearrangement constant: in dimension q, any zero-average family
# of vectors of norm <= M can be ordered with partial sums staying within
# q*M of the straight path, so exploring a box inflated by that much is an
# exact enumeration strategy for monoid orbits.
STEINITZ_FACTOR = 1


@dataclass(frozen=True, order=True)
class GroupElement:
    vec: Vector
    part: int


@dataclass(frozen=True)
class VAGroup:
    rank: int
    order: int
    mult: tuple[tuple[int, ...], ...]
    action: tuple[Matrix, ...]
    cocycle: tuple[tuple[Vector, ...], ...]

    def identity(self) -> GroupElement:
        return GroupElement((0,) * self.rank, 0)


@dataclass(frozen=True)
class WeightedGenerator:
    name: str
    element: GroupElement
    weight: int


def _identity_matrix(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def _apply(matrix: Matrix, vec: Vector) -> Vector:
    return tuple(sum(row[j] * vec[j] for j in range(len(vec))) for row in matrix)


def _mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n))
        for i in range(n)
    )


def _det(matrix: Matrix) -> int:
    """Exact integer determinant by fraction-free (Bareiss) elimination."""
    n = len(matrix)
    if n == 0:
        return 1
    m = [list(row) for row in matrix]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def validate_group(group: VAGroup, *, order_cap: int = DEFAULT_ORDER_CAP) -> list[str]:
    """Exhaustively check the extension axioms; empty report means valid."""
    report = []
    k, n = group.order, group.rank
    if k < 1:
        return [f"order {k} must be positive"]
    if k > order_cap:
        return [f"order {k} exceeds the cap {order_cap}"]
    if n < 0:
        report.append(f"negative rank {n}")
    if len(group.mult) != k or any(len(row) != k for row in group.mult):
        return report + ["multiplication table is not order x order"]
    for f, row in enumerate(group.mult):
        for g, h in enumerate(row):
            if not 0 <= h < k:
                report.append(f"mult[{f}][{g}] = {h} out of range")
    if report:
        return report
    for g in range(k):
        if group.mult[0][g] != g or group.mult[g][0] != g:
            report.append(f"index 0 is not an identity at {g}")
    for f in range(k):
        for g in range(k):
            for h in range(k):
                if (
                    group.mult[group.mult[f][g]][h]
                    != group.mult[f][group.mult[g][h]]
                ):
                    report.append(f"associativity fails at ({f}, {g}, {h})")
    for f in range(k):
        if not any(
            group.mult[f][g] == 0 and group.mult[g][f] == 0 for g in range(k)
        ):
            report.append(f"no inverse for finite part {f}")
    if len(group.action) != k:
        return report + ["need one action matrix per finite part"]
    for f, mat in enumerate(group.action):
        if len(mat) != n or any(len(row) != n for row in mat):
            report.append(f"action matrix {f} is not rank x rank")
    if report:
        return report
    if group.action[0] != _identity_matrix(n):
        report.append("action of the identity is not the identity matrix")
    for f, mat in enumerate(group.action):
        if _det(mat) not in (1, -1):
            report.append(f"action matrix {f} is not invertible over the integers")
    for f in range(k):
        for g in range(k):
            if _mat_mul(group.action[f], group.action[g]) != group.action[
                group.mult[f][g]
            ]:
                report.append(f"action is not a homomorphism at ({f}, {g})")
    if len(group.cocycle) != k or any(len(row) != k for row in group.cocycle):
        return report + ["cocycle table is not order x order"]
    for f in range(k):
        for g in range(k):
            if len(group.cocycle[f][g]) != n:
                report.append(f"cocycle({f}, {g}) has wrong length")
    if report:
        return report
    for g in range(k):
        if any(group.cocycle[0][g]) or any(group.cocycle[g][0]):
            report.append(f"cocycle is not normalized at index {g}")
    for f in range(k):
        for g in range(k):
            for h in range(k):
                lhs = tuple(
                    a + b
                    for a, b in zip(
                        _apply(group.action[f], group.cocycle[g][h]),
                        group.cocycle[f][group.mult[g][h]],
                    )
                )
                rhs = tuple(
                    a + b
                    for a, b in zip(
                        group.cocycle[f][g], group.cocycle[group.mult[f][g]][h]
                    )
                )
                if lhs != rhs:
                    report.append(f"cocycle identity fails at ({f}, {g}, {h})")
    return report


def multiply(group: VAGroup, a: GroupElement, b: GroupElement) -> GroupElement:
    vec = tuple(
        x + y + z
        for x, y, z in zip(
            a.vec, _apply(group.action[a.part], b.vec), group.cocycle[a.part][b.part]
        )
    )
    return GroupElement(vec, group.mult[a.part][b.part])


def inverse(group: VAGroup, a: GroupElement) -> GroupElement:
    part = next(
        g
        for g in range(group.order)
        if group.mult[a.part][g] == 0 and group.mult[g][a.part] == 0
    )
    shifted = tuple(x + y for x, y in zip(a.vec, group.cocycle[a.part][part]))
    vec = tuple(-x for x in _apply(group.action[part], shifted))
    return GroupElement(vec, part)


def element_vertex(el: GroupElement) -> PeriodicVertex:
    return PeriodicVertex(el.part, el.vec)


def vertex_element(v: PeriodicVertex) -> GroupElement:
    return GroupElement(v.coord, v.orbit)


def build_cayley(
    group: VAGroup, gens: list[WeightedGenerator]
) -> tuple[QuotientGraph, PeriodicVertex]:
    """Right Cayley graph as a periodic graph, with the identity as base.

    One orbit per finite part, one edge orbit per (orbit, generator); the
    edge shift is the lattice part of right multiplication at the orbit's
    canonical lift.
    """
    edges = []
    for f in range(group.order):
        for gen in gens:
            s = gen.element
            shift = tuple(
                x + y
                for x, y in zip(
                    _apply(group.action[f], s.vec), group.cocycle[f][s.part]
                )
            )
            edges.append(
                EdgeOrbit(
                    len(edges), f, group.mult[f][s.part], shift, gen.weight
                )
            )
    names = tuple(f"f{f}" for f in range(group.order))
    graph = QuotientGraph(group.rank, names, tuple(edges))
    return graph, PeriodicVertex(0, (0,) * group.rank)


# ---------------------------------------------------------------------------
# equations


Token = tuple[str, int] | tuple[str, GroupElement]


@dataclass(frozen=True)
class EquationWord:
    tokens: tuple[Token, ...]


def evaluate_word(
    group: VAGroup, word: EquationWord, assignment: tuple[GroupElement, ...]
) -> GroupElement:
    value = group.identity()
    for kind, payload in word.tokens:
        if kind == "var":
            value = multiply(group, value, assignment[payload - 1])
        elif kind == "inv":
            value = multiply(group, value, inverse(group, assignment[payload - 1]))
        else:
            value = multiply(group, value, payload)
    return value


def solve_box(
    group: VAGroup,
    arity: int,
    words: list[EquationWord],
    radius: int,
    *,
    cap: int = 2_000_000,
) -> list[tuple[GroupElement, ...]]:
    """All solution tuples with every lattice coordinate in [-radius, radius].

    Brute force by definition: this is the oracle-grade truncation of the
    solution set, not a fast path.
    """
    per_coordinate = (2 * radius + 1) ** group.rank * group.order
    total = per_coordinate**arity
    if total > cap:
        raise GuardError(
            f"box enumeration would visit {total} tuples, cap is {cap}"
        )
    coords = [
        GroupElement(vec, part)
        for vec in itertools.product(
            range(-radius, radius + 1), repeat=group.rank
        )
        for part in range(group.order)
    ]
    identity = group.identity()
    solutions = []
    for tup in itertools.product(coords, repeat=arity):
        if all(evaluate_word(group, w, tup) == identity for w in words):
            solutions.append(tup)
    solutions.sort(key=lambda tup: tuple((el.vec, el.part) for el in tup))
    return solutions


# ---------------------------------------------------------------------------
# monoid-module form of an algebraic set


@dataclass(frozen=True)
class MonoidModulePiece:
    """One piece: the orbit of `shift` under the monoid generated by `ugens`."""

    ugens: tuple[tuple[Vector, ...], ...]  # each generator is d lattice vectors
    shift: tuple[GroupElement, ...]


@dataclass(frozen=True)
class MonoidModuleSet:
    arity: int
    pieces: tuple[MonoidModulePiece, ...]


def enumerate_monoid_module_set(
    group: VAGroup,
    gens: list[WeightedGenerator],
    mmset: MonoidModuleSet,
    box: tuple[int, ...],
    *,
    cap: int = DEFAULT_BALL_CAP,
    distance_map: DistanceMap | None = None,
) -> list[tuple[GroupElement, ...]]:
    """All elements whose every coordinate has word weight within the box.

    Each piece's monoid orbit is explored inside a lattice region wide
    enough (a Steinitz inflation of the ball's bounding box) to make the
    restricted walk enumeration provably exhaustive.  Declared disjointness
    is verified on the enumerated sets and violations are hard errors.
    """
    if len(box) != mmset.arity:
        raise InputError("box arity does not match set arity")
    graph, base = build_cayley(group, gens)
    radius = max(box)
    dm = distance_map
    if dm is None or dm.radius < radius:
        dm = distances_upto(graph, base, radius, cap=cap)
    n, d = group.rank, mmset.arity
    q = n * d
    # per-orbit lattice points of the ball, with their distances
    by_orbit: dict[int, list[tuple[Vector, int]]] = {}
    for v, dist in dm.entries.items():
        by_orbit.setdefault(v.orbit, []).append((v.coord, dist))
    seen_by_piece = []
    for piece in mmset.pieces:
        allowed: list[set[Vector]] = []
        for bound, t in zip(box, piece.shift):
            pts = by_orbit.get(t.part, [])
            allowed.append(
                {
                    tuple(c - tc for c, tc in zip(coord, t.vec))
                    for coord, dist in pts
                    if dist <= bound
                }
            )
        if any(not a for a in allowed):
            seen_by_piece.append(set())
            continue
        flat_gens = [
            tuple(itertools.chain.from_iterable(gen)) for gen in piece.ugens
        ]
        step = max((abs(c) for gen in flat_gens for c in gen), default=0)
        inflation = STEINITZ_FACTOR * q * step
        lo = [0] * q
        hi = [0] * q
        for i, a in enumerate(allowed):
            for j in range(n):
                axis = i * n + j
                values = [u[j] for u in a]
                lo[axis] = min(min(values), 0) - inflation
                hi[axis] = max(max(values), 0) + inflation
        cells = 1
        for l, h in zip(lo, hi):
            cells *= h - l + 1
            if cells > cap:
                raise ResourceLimitError(
                    f"monoid orbit region exceeds {cap} lattice cells"
                )
        origin = (0,) * q
        visited = {origin}
        frontier = [origin]
        while frontier:
            nxt = []
            for p in frontier:
                for gen in flat_gens:
                    np_ = tuple(x + y for x, y in zip(p, gen))
                    if np_ in visited:
                        continue
                    if any(not l <= x <= h for x, l, h in zip(np_, lo, hi)):
                        continue
                    visited.add(np_)
                    nxt.append(np_)
            frontier = nxt
        members = set()
        for p in visited:
            chunks = [p[i * n : (i + 1) * n] for i in range(d)]
            if all(chunk in allowed[i] for i, chunk in enumerate(chunks)):
                members.add(
                    tuple(
                        GroupElement(
                            tuple(c + tc for c, tc in zip(chunk, t.vec)), t.part
                        )
                        for chunk, t in zip(chunks, piece.shift)
                    )
                )
        seen_by_piece.append(members)
    for i in range(len(seen_by_piece)):
        for j in range(i + 1, len(seen_by_piece)):
            overlap = seen_by_piece[i] & seen_by_piece[j]
            if overlap:
                raise DisjointnessError(
                    f"pieces {i} and {j} overlap at {sorted(overlap)[0]}"
                )
    union = set().union(*seen_by_piece) if seen_by_piece else set()
    return sorted(union, key=lambda tup: tuple((el.vec, el.part) for el in tup))


def quotient_reachable_orbits(graph: QuotientGraph, start: int) -> set[int]:
    """Orbits reachable from the start orbit in the quotient graph."""
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for orbit in frontier:
            for eo in graph.out_edges(orbit):
                if eo.dst not in seen:
                    seen.add(eo.dst)
                    nxt.append(eo.dst)
        frontier = nxt
    return seen


def relative_growth_terms(
    group: VAGroup,
    gens: list[WeightedGenerator],
    tuples: list[tuple[GroupElement, ...]],
    box: tuple[int, ...],
    *,
    cap: int = DEFAULT_BALL_CAP,
) -> RelativeCountTable:
    """Count tuples by per-coordinate word weight over the box.

    Coordinates that are certifiably not representable (their coset is
    unreachable in the quotient) are dropped, matching the convention that
    an infinite weight contributes nothing.  A coordinate whose coset is
    reachable but which lies outside the computed ball is rejected: it may
    have finite weight beyond the box, and only the producer can rule that
    in or out.
    """
    graph, base = build_cayley(group, gens)
    radius = max(box) if box else 0
    dm = distances_upto(graph, base, radius, cap=cap)
    reachable = quotient_reachable_orbits(graph, base.orbit)
    kept = []
    for tup in tuples:
        drop = False
        for el in tup:
            v = element_vertex(el)
            if v in dm:
                continue
            if el.part not in reachable:
                drop = True
                break
            raise CoverageError(
                f"coordinate {el} is outside the radius-{radius} ball but its "
                "coset is reachable; enlarge the box or pre-truncate the set"
            )
        if not drop:
            kept.append(tuple(element_vertex(el) for el in tup))
    return relative_counts(graph, base, kept, box, cap=cap, distance_map=dm)


def univariate_terms(
    group: VAGroup,
    gens: list[WeightedGenerator],
    tuples: list[tuple[GroupElement, ...]],
    through: int,
    *,
    cap: int = DEFAULT_BALL_CAP,
) -> list[int]:
    """Counts of tuples by total word weight, complete through `through`.

    Any tuple of total weight <= through has every coordinate weight
    <= through and therefore sits inside the radius-`through` ball, so a
    tuple with an out-of-ball coordinate contributes nothing here (its
    total is larger than the window or infinite) and is skipped exactly.
    """
    graph, base = build_cayley(group, gens)
    dm = distances_upto(graph, base, through, cap=cap)
    terms = [0] * (through + 1)
    for tup in tuples:
        total = 0
        for el in tup:
            dist = dm.distance(element_vertex(el))
            if dist is None:
                total = None
                break
            total += dist
        if total is not None and total <= through:
            terms[total] += 1
    return terms


def cycle_weight_set(graph: QuotientGraph, *, cycle_cap: int = 1_000_000) -> list[int]:
    return sorted(
        {walk_weight(graph, c) for c in enumerate_cycles(graph, cap=cycle_cap)}
    )


def default_set_denominator(
    group: VAGroup,
    gens: list[WeightedGenerator],
    mmset: MonoidModuleSet,
    *,
    cap: int = DEFAULT_BALL_CAP,
    cycle_cap: int = 1_000_000,
) -> list[tuple[tuple[int, ...], int]]:
    """Denominator ansatz for the multivariate fit of a monoid-module set.

    Per axis: (1 - z_i) and one (1 - z_i^w) per distinct cycle weight of
    the Cayley quotient; plus one coupling factor (1 - z^w) per piece
    generator, graded by the word weight of each coordinate's translation.
    """
    graph, base = build_cayley(group, gens)
    d = mmset.arity
    vectors: set[tuple[int, ...]] = set()
    weights = cycle_weight_set(graph, cycle_cap=cycle_cap)
    for i in range(d):
        vectors.add(tuple(1 if j == i else 0 for j in range(d)))
        vectors.update(tuple(w if j == i else 0 for j in range(d)) for w in weights)
    # coupling terms: grade each piece generator by the word weight of its
    # per-coordinate lattice translation, skipping unrepresentable ones
    lattice_points = [u for piece in mmset.pieces for gen in piece.ugens for u in gen]
    if lattice_points:
        radius = max(sum(abs(c) for c in u) for u in lattice_points) * max(
            (g.weight for g in gens), default=1
        )
        dm = distances_upto(graph, base, radius, cap=cap)
        for piece in mmset.pieces:
            for gen in piece.ugens:
                wvec = []
                for u in gen:
                    dist = 0 if not any(u) else dm.distance(PeriodicVertex(0, u))
                    if dist is None:
                        break
                    wvec.append(dist)
                else:
                    if any(wvec):
                        vectors.add(tuple(wvec))
    return [(w, 1) for w in sorted(vectors, key=lambda w: (sum(w), w))]


# ---------------------------------------------------------------------------
# text formats


def _int_tokens(tokens, lineno, what):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise FormatError(f"{what} must be integers", lineno) from None


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def parse_vag(text: str) -> tuple[VAGroup, list[WeightedGenerator]]:
    """Parse the `.vag` format: rank, finite order, tables, generators."""
    rank = order = None
    mult = None
    action: dict[int, Matrix] = {}
    cocycle: dict[tuple[int, int], Vector] = {}
    gens: list[WeightedGenerator] = []
    for lineno, tokens in _lines(text):
        key = tokens[0]
        if key == "rank":
            rank = int(tokens[1])
        elif key == "finite":
            order = int(tokens[1])
        elif key == "mult":
            if order is None:
                raise FormatError("finite must come before mult", lineno)
            values = _int_tokens(tokens[1:], lineno, "mult entries")
            if len(values) != order * order:
                raise FormatError(
                    f"mult needs {order * order} entries, got {len(values)}", lineno
                )
            mult = tuple(
                tuple(values[i * order : (i + 1) * order]) for i in range(order)
            )
        elif key == "action":
            if rank is None:
                raise FormatError("rank must come before action", lineno)
            m = re.fullmatch(r"f=(\d+)", tokens[1])
            if not m:
                raise FormatError("action needs f=<index>", lineno)
            f = int(m.group(1))
            values = _int_tokens(tokens[2:], lineno, "action entries")
            if len(values) != rank * rank:
                raise FormatError(
                    f"action needs {rank * rank} entries, got {len(values)}", lineno
                )
            action[f] = tuple(
                tuple(values[i * rank : (i + 1) * rank]) for i in range(rank)
            )
        elif key == "cocycle":
            if rank is None:
                raise FormatError("rank must come before cocycle", lineno)
            mf = re.fullmatch(r"f=(\d+)", tokens[1])
            mg = re.fullmatch(r"g=(\d+)", tokens[2])
            if not mf or not mg:
                raise FormatError("cocycle needs f=<i> g=<j>", lineno)
            values = _int_tokens(tokens[3:], lineno, "cocycle entries")
            if len(values) != rank:
                raise FormatError(f"cocycle needs {rank} entries", lineno)
            cocycle[(int(mf.group(1)), int(mg.group(1)))] = tuple(values)
        elif key == "gen":
            if rank is None or order is None:
                raise FormatError("rank and finite must come before gen", lineno)
            if len(tokens) != 4 + rank:
                raise FormatError(
                    f"gen needs name, {rank} vector entries, part and weight", lineno
                )
            name = tokens[1]
            values = _int_tokens(tokens[2:], lineno, "gen entries")
            vec, part, weight = tuple(values[:rank]), values[rank], values[rank + 1]
            if not 0 <= part < order:
                raise FormatError(f"gen part {part} out of range", lineno)
            if weight < 1:
                raise FormatError(f"gen weight {weight} must be positive", lineno)
            if any(g.name == name for g in gens):
                raise FormatError(f"duplicate generator name {name!r}", lineno)
            gens.append(WeightedGenerator(name, GroupElement(vec, part), weight))
        else:
            raise FormatError(f"unknown directive {key!r}", lineno)
    if rank is None or order is None:
        raise FormatError("missing rank or finite directive")
    if mult is None:
        if order == 1:
            mult = ((0,),)
        else:
            raise FormatError("missing mult directive")
    matrices = []
    for f in range(order):
        if f == 0:
            matrices.append(_identity_matrix(rank))
        elif f in action:
            matrices.append(action[f])
        else:
            raise FormatError(f"missing action matrix for f={f}")
    zero = (0,) * rank
    table = tuple(
        tuple(cocycle.get((f, g), zero) for g in range(order)) for f in range(order)
    )
    return VAGroup(rank, order, mult, tuple(matrices), table), gens


_CONST_RE = re.compile(r"\[([0-9,\s-]*);(\d+)\]")


def _parse_const(token: str, rank: int, lineno: int) -> GroupElement:
    m = _CONST_RE.fullmatch(token)
    if not m:
        raise FormatError(f"bad constant token {token!r}", lineno)
    body = m.group(1).strip()
    vec = tuple(int(t) for t in body.split(",")) if body else ()
    if len(vec) != rank:
        raise FormatError(
            f"constant vector has length {len(vec)}, rank is {rank}", lineno
        )
    return GroupElement(vec, int(m.group(2)))


def parse_eqn(text: str, group: VAGroup) -> tuple[int, list[EquationWord]]:
    """Parse the `.eqn` format: vars count plus one word per line."""
    arity = None
    words: list[EquationWord] = []
    for lineno, tokens in _lines(text):
        if tokens[0] == "vars":
            arity = int(tokens[1])
            if arity < 1:
                raise FormatError("vars must be positive", lineno)
        elif tokens[0] == "word":
            if arity is None:
                raise FormatError("vars must come before word", lineno)
            parsed: list[Token] = []
            for token in tokens[1:]:
                m = re.fullmatch(r"X(\d+)(~?)", token)
                if m:
                    index = int(m.group(1))
                    if not 1 <= index <= arity:
                        raise FormatError(
                            f"variable index {index} out of range", lineno
                        )
                    parsed.append(("inv" if m.group(2) else "var", index))
                else:
                    parsed.append(("const", _parse_const(token, group.rank, lineno)))
            words.append(EquationWord(tuple(parsed)))
        else:
            raise FormatError(f"unknown directive {tokens[0]!r}", lineno)
    if arity is None:
        raise FormatError("missing vars directive")
    return arity, words


_SHIFT_RE = re.compile(r"\(([0-9,\s-]*);(\d+)\)")


def parse_set(text: str, group: VAGroup) -> MonoidModuleSet:
    """Parse the `.set` format: arity plus piece blocks (ugen lines, one shift)."""
    arity = None
    pieces: list[MonoidModulePiece] = []
    current_gens: list[tuple[Vector, ...]] | None = None
    current_shift: tuple[GroupElement, ...] | None = None
    current_line = None

    def close(lineno):
        nonlocal current_gens, current_shift
        if current_gens is None:
            return
        if current_shift is None:
            raise FormatError("piece has no shift line", current_line)
        pieces.append(MonoidModulePiece(tuple(current_gens), current_shift))
        current_gens = None
        current_shift = None

    for lineno, tokens in _lines(text):
        key = tokens[0]
        if key == "arity":
            arity = int(tokens[1])
            if arity < 1:
                raise FormatError("arity must be positive", lineno)
        elif key == "piece":
            if arity is None:
                raise FormatError("arity must come before piece", lineno)
            close(lineno)
            current_gens = []
            current_line = lineno
        elif key == "ugen":
            if current_gens is None:
                raise FormatError("ugen outside a piece block", lineno)
            values = _int_tokens(tokens[1:], lineno, "ugen entries")
            if len(values) != arity * group.rank:
                raise FormatError(
                    f"ugen needs {arity * group.rank} entries, got {len(values)}",
                    lineno,
                )
            current_gens.append(
                tuple(
                    tuple(values[i * group.rank : (i + 1) * group.rank])
                    for i in range(arity)
                )
            )
        elif key == "shift":
            if current_gens is None:
                raise FormatError("shift outside a piece block", lineno)
            if current_shift is not None:
                raise FormatError("piece has two shift lines", lineno)
            if len(tokens) != arity + 1:
                raise FormatError(f"shift needs {arity} tuples", lineno)
            parts = []
            for token in tokens[1:]:
                m = _SHIFT_RE.fullmatch(token)
                if not m:
                    raise FormatError(f"bad shift token {token!r}", lineno)
                body = m.group(1).strip()
                vec = tuple(int(t) for t in body.split(",")) if body else ()
                if len(vec) != group.rank:
                    raise FormatError(
                        f"shift vector has length {len(vec)}, rank is {group.rank}",
                        lineno,
                    )
                part = int(m.group(2))
                if not 0 <= part < group.order:
                    raise FormatError(f"shift part {part} out of range", lineno)
                parts.append(GroupElement(vec, part))
            current_shift = tuple(parts)
        else:
            raise FormatError(f"unknown directive {key!r}", lineno)
    close(None)
    if arity is None:
        raise FormatError("missing arity directive")
    return MonoidModuleSet(arity, tuple(pieces))
