"""Recognition, clique covers, enumeration and monomial encodings of UEC-representatives.

A graph is a UEC-representative when its independence number equals its
intersection number. Here the intersection number counts cliques needed to
cover every edge and every vertex, so an isolated vertex costs one singleton
clique. For such graphs the minimum cover is unique and consists of the closed
neighborhoods of a maximum independent set.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .graph import GraphError, UndirectedGraph, pair_list

DEFAULT_ENUMERATION_LIMIT = 6


class NotUECError(GraphError):
    """Raised when an operation needs a UEC-representative and gets something else."""

    def __init__(self, graph: UndirectedGraph, message: str | None = None):
        self.graph = graph
        self.alpha = independence_number(graph)
        self.delta = intersection_number(graph)
        super().__init__(
            message
            or f"not a UEC-representative: independence number {self.alpha} < intersection number {self.delta}"
        )


@dataclass(frozen=True)
class CliqueCover:
    """Cliques of a minimum cover together with one private center per clique."""

    cliques: tuple[frozenset[int], ...]
    centers: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.cliques)

    def as_sorted_lists(self) -> list[list[int]]:
        return [sorted(c) for c in self.cliques]


# ---------------------------------------------------------------------------
# Polynomial recognition


def _simplicial_groups(g: UndirectedGraph) -> dict[int, list[int]]:
    """Map clique-valued closed neighborhoods (as bitmasks) to their vertices."""
    nbr = g.neighbor_masks()
    groups: dict[int, list[int]] = {}
    for v in range(g.n):
        closed = nbr[v] | (1 << v)
        # ne[v] is a clique iff every member's closed neighborhood contains it
        if all((nbr[u] | (1 << u)) & closed == closed for u in _bits(closed)):
            groups.setdefault(closed, []).append(v)
    return groups


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _edge_mask_of_clique(n: int, clique: int) -> int:
    return _clique_pairs(n)[clique]


_PAIR_TABLES: dict[int, list[int]] = {}


def _clique_pairs(n: int) -> list[int]:
    """Table from vertex bitmask to the edge bitmask of the complete graph on it."""
    table = _PAIR_TABLES.get(n)
    if table is None:
        pairs = pair_list(n)
        pair_bit = {p: 1 << k for k, p in enumerate(pairs)}
        table = [0] * (1 << n)
        for mask in range(1, 1 << n):
            low = (mask & -mask).bit_length() - 1
            rest = mask & (mask - 1)
            edges = table[rest]
            for v in _bits(rest):
                edges |= pair_bit[(low, v)]
            table[mask] = edges
        _PAIR_TABLES[n] = table
    return table


def edge_mask_from_cliques(n: int, cliques: Iterable[int]) -> int:
    """Edge bitmask of the union of cliques given as vertex bitmasks."""
    table = _clique_pairs(n) if n <= 16 else None
    out = 0
    for c in cliques:
        if table is not None:
            out |= table[c]
        else:  # pragma: no cover - large n
            out |= UndirectedGraph.from_cliques(n, [_bits(c)]).mask
    return out


def _recognize(g: UndirectedGraph) -> CliqueCover | None:
    groups = _simplicial_groups(g)
    centers = sorted(min(vs) for vs in groups.values())
    closed = {min(vs): mask for mask, vs in groups.items()}
    nbr = g.neighbor_masks()
    for a, b in combinations(centers, 2):
        if nbr[a] >> b & 1:
            return None
    covered = edge_mask_from_cliques(g.n, closed.values())
    if covered != g.mask:
        return None
    return CliqueCover(
        cliques=tuple(frozenset(_bits(closed[c])) for c in centers),
        centers=tuple(centers),
    )


def is_uec_representative(g: UndirectedGraph) -> bool:
    """Polynomial-time test for independence number == intersection number."""
    return _recognize(g) is not None


def min_edge_clique_cover(g: UndirectedGraph) -> CliqueCover:
    """The unique minimum clique cover of a UEC-representative.

    Centers are the lowest-index vertex among those sharing a clique-valued
    closed neighborhood. Raises :class:`NotUECError` otherwise.
    """
    cover = _recognize(g)
    if cover is None:
        raise NotUECError(g)
    return cover


# ---------------------------------------------------------------------------
# Exact (exponential) numbers, used for diagnostics


def independence_number(g: UndirectedGraph) -> int:
    return len(maximum_independent_set(g))


def maximum_independent_set(g: UndirectedGraph) -> list[int]:
    nbr = g.neighbor_masks()
    best: list[int] = []

    def grow(chosen: list[int], candidates: int) -> None:
        nonlocal best
        if len(chosen) + bin(candidates).count("1") <= len(best):
            return
        if not candidates:
            best = list(chosen)
            return
        v = (candidates & -candidates).bit_length() - 1
        chosen.append(v)
        grow(chosen, candidates & ~nbr[v] & ~(1 << v))
        chosen.pop()
        grow(chosen, candidates & ~(1 << v))

    grow([], (1 << g.n) - 1)
    return sorted(best)


def maximal_cliques(g: UndirectedGraph) -> list[int]:
    """All maximal cliques as vertex bitmasks (Bron-Kerbosch with pivoting)."""
    nbr = g.neighbor_masks()
    out: list[int] = []

    def expand(r: int, p: int, x: int) -> None:
        if not p and not x:
            out.append(r)
            return
        pivot = max(_bits(p | x), key=lambda u: bin(p & nbr[u]).count("1"))
        for v in _bits(p & ~nbr[pivot]):
            expand(r | (1 << v), p & nbr[v], x & nbr[v])
            p &= ~(1 << v)
            x |= 1 << v

    expand(0, (1 << g.n) - 1, 0)
    return sorted(out)


def minimum_clique_cover(g: UndirectedGraph) -> list[frozenset[int]]:
    """A minimum set of cliques covering all edges and vertices (exponential search)."""
    target = g.mask
    full = (1 << g.n) - 1
    cliques = maximal_cliques(g)
    for size in range(0 if g.n == 0 else 1, len(cliques) + 1):
        for combo in combinations(cliques, size):
            union = 0
            for c in combo:
                union |= c
            if union == full and edge_mask_from_cliques(g.n, combo) == target:
                return [frozenset(_bits(c)) for c in combo]
    raise AssertionError("maximal cliques always cover")  # pragma: no cover


def intersection_number(g: UndirectedGraph) -> int:
    return len(minimum_clique_cover(g))


# ---------------------------------------------------------------------------
# Enumeration via minimal covers


def minimal_covers(n: int) -> list[tuple[int, ...]]:
    """All minimal covers of ``{0..n-1}`` as sorted tuples of vertex bitmasks.

    A cover is minimal when every member owns an element no other member has.
    Sets are added in increasing bitmask order; a set that loses its last
    private element can never regain one, which prunes the search.
    """
    full = (1 << n) - 1
    out: list[tuple[int, ...]] = []

    def private(sets: list[int], k: int) -> int:
        others = 0
        for j, s in enumerate(sets):
            if j != k:
                others |= s
        return sets[k] & ~others

    def extend(sets: list[int], union: int, start: int) -> None:
        if union == full:
            out.append(tuple(sets))
        for s in range(start, full + 1):
            if not s & ~union:
                continue  # no private element possible
            sets.append(s)
            if all(private(sets, k) for k in range(len(sets))):
                extend(sets, union | s, s + 1)
            sets.pop()

    if n == 0:
        return [()]
    extend([], 0, 1)
    return out


def enumerate_uec_representatives(n: int, limit: int = DEFAULT_ENUMERATION_LIMIT) -> list[UndirectedGraph]:
    """One graph per minimal cover of the vertex set, sorted by edge mask."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > limit:
        raise ValueError(f"n={n} exceeds enumeration limit {limit}")
    masks = sorted(edge_mask_from_cliques(n, cover) for cover in minimal_covers(n))
    return [UndirectedGraph.from_mask(n, m) for m in masks]


# ---------------------------------------------------------------------------
# Canonical id


def uec_id(g: UndirectedGraph) -> str:
    """Hex of the edge-indicator bitmask (bit k = k-th pair in lexicographic order)."""
    return mask_to_id(g.n, g.mask)


def mask_to_id(n: int, mask: int) -> str:
    width = max(1, (len(pair_list(n)) + 3) // 4)
    return format(mask, f"0{width}x")


def id_to_graph(n: int, ident: str) -> UndirectedGraph:
    return UndirectedGraph.from_mask(n, int(ident, 16))


# ---------------------------------------------------------------------------
# Monomial representation

Term = tuple[int, frozenset[int]]


@dataclass(frozen=True)
class SufficientStatistic:
    sources: tuple[int, ...]
    assn: tuple[int, ...]


@dataclass(frozen=True)
class MonomialRep:
    """Product of terms ``x_{i|A}``: source ``i`` with tail ``A``.

    Terms are kept sorted by source. No source may appear in any tail.
    """

    n: int
    terms: tuple[Term, ...]

    def __post_init__(self) -> None:
        terms = tuple(sorted((int(i), frozenset(a)) for i, a in self.terms))
        object.__setattr__(self, "terms", terms)
        sources = [i for i, _ in terms]
        if len(set(sources)) != len(sources):
            raise ValueError("duplicate source")
        covered: set[int] = set()
        for i, tail in terms:
            if not 0 <= i < self.n or any(not 0 <= v < self.n for v in tail):
                raise ValueError("vertex out of range")
            covered |= tail | {i}
        src = set(sources)
        for i, tail in terms:
            if tail & src:
                raise ValueError(f"tail of source {i} contains a source: {sorted(tail & src)}")
        if covered != set(range(self.n)):
            raise ValueError(f"vertices {sorted(set(range(self.n)) - covered)} are in no term")

    @classmethod
    def of(cls, n: int, terms: Sequence[tuple[int, Iterable[int]]]) -> "MonomialRep":
        return cls(n, tuple((i, frozenset(a)) for i, a in terms))

    @property
    def sources(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.terms)

    @property
    def tails(self) -> tuple[frozenset[int], ...]:
        return tuple(a for _, a in self.terms)

    def cliques(self) -> list[frozenset[int]]:
        return [a | {i} for i, a in self.terms]

    def realize(self) -> UndirectedGraph:
        return UndirectedGraph.from_cliques(self.n, self.cliques())

    def __str__(self) -> str:
        parts = []
        for i, a in self.terms:
            tail = ",".join(str(v) for v in sorted(a)) or "-"
            parts.append(f"x[{i}|{tail}]")
        return "".join(parts)


def monomial_rep(g: UndirectedGraph) -> MonomialRep:
    """One term per cover clique: source is the center, tail the rest of the clique."""
    cover = min_edge_clique_cover(g)
    return MonomialRep(g.n, tuple((c, clique - {c}) for c, clique in zip(cover.centers, cover.cliques)))


def sufficient_statistic(rep: MonomialRep) -> SufficientStatistic:
    """Sources plus, for every vertex, how many terms carry it in their tail."""
    assn = [0] * rep.n
    for _, tail in rep.terms:
        for v in tail:
            assn[v] += 1
    return SufficientStatistic(rep.sources, tuple(assn))


def all_monomial_reps(g: UndirectedGraph) -> list[MonomialRep]:
    """Every valid representation: any private vertex of each clique may be its source."""
    cover = min_edge_clique_cover(g)
    cliques = list(cover.cliques)
    choices = []
    for k, clique in enumerate(cliques):
        others = frozenset().union(*(c for j, c in enumerate(cliques) if j != k))
        choices.append(sorted(clique - others))
    reps = []

    def pick(k: int, chosen: list[int]) -> None:
        if k == len(cliques):
            reps.append(MonomialRep(g.n, tuple((c, cliques[j] - {c}) for j, c in enumerate(chosen))))
            return
        for c in choices[k]:
            chosen.append(c)
            pick(k + 1, chosen)
            chosen.pop()

    pick(0, [])
    return reps
