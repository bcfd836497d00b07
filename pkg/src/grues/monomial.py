"""Reference moves on monomial representations.

Each move rewrites one or two terms of a :class:`~grues.uec.MonomialRep`.
Term indices refer to the canonical, source-sorted order of ``rep.terms``.
These are deliberately simple and serve as the cross-check for the faster
moves on DAG-reductions.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import chain, combinations
from typing import Iterator, Literal

from .graph import UndirectedGraph
from .uec import MonomialRep, all_monomial_reps, sufficient_statistic

MoveKind = Literal["within", "out_add", "out_del", "merge", "split"]
MOVE_KINDS: tuple[MoveKind, ...] = ("merge", "split", "out_add", "out_del", "within")


class MoveError(ValueError):
    """A move's preconditions are not met."""


@dataclass(frozen=True)
class BinomialMove:
    kind: MoveKind
    j1: int
    j2: int | None = None
    vertices: frozenset[int] = frozenset()


def _terms(rep: MonomialRep) -> list[tuple[int, frozenset[int]]]:
    return list(rep.terms)


def _check_index(rep: MonomialRep, *js: int) -> None:
    for j in js:
        if not 0 <= j < len(rep.terms):
            raise MoveError(f"term index {j} out of range")


def apply_within(rep: MonomialRep, j1: int, j2: int, moved: frozenset[int] | set[int]) -> MonomialRep:
    """Move the vertex set ``moved`` from the tail of term ``j2`` to the tail of term ``j1``."""
    _check_index(rep, j1, j2)
    moved = frozenset(moved)
    if j1 == j2 and moved:
        raise MoveError("within move needs two distinct terms")
    terms = _terms(rep)
    (i1, a1), (i2, a2) = terms[j1], terms[j2]
    if not moved <= a2:
        raise MoveError("moved set is not inside the donor tail")
    if moved & a1:
        raise MoveError("moved set overlaps the receiving tail")
    terms[j1] = (i1, a1 | moved)
    terms[j2] = (i2, a2 - moved)
    return MonomialRep(rep.n, tuple(terms))


def apply_out_add(rep: MonomialRep, j1: int, j2: int, c: int) -> MonomialRep:
    """Add ``c`` (already in tail ``j1``) to tail ``j2``."""
    _check_index(rep, j1, j2)
    terms = _terms(rep)
    if c not in terms[j1][1] or c in terms[j2][1]:
        raise MoveError("out_add needs c in tail j1 and not in tail j2")
    i2, a2 = terms[j2]
    terms[j2] = (i2, a2 | {c})
    return MonomialRep(rep.n, tuple(terms))


def apply_out_del(rep: MonomialRep, j1: int, j2: int, c: int) -> MonomialRep:
    """Remove ``c`` from tail ``j2``; ``c`` must also lie in tail ``j1``."""
    _check_index(rep, j1, j2)
    terms = _terms(rep)
    if j1 == j2 or c not in terms[j1][1] or c not in terms[j2][1]:
        raise MoveError("out_del needs c in both tails")
    i2, a2 = terms[j2]
    terms[j2] = (i2, a2 - {c})
    return MonomialRep(rep.n, tuple(terms))


def apply_merge(rep: MonomialRep, j1: int, j2: int) -> MonomialRep:
    """Fuse two terms with identical tails into one clique sourced at ``j1``."""
    _check_index(rep, j1, j2)
    terms = _terms(rep)
    (i1, a1), (i2, a2) = terms[j1], terms[j2]
    if j1 == j2 or a1 != a2:
        raise MoveError("merge needs two distinct terms with equal tails")
    terms[j1] = (i1, a1 | {i2})
    del terms[j2]
    return MonomialRep(rep.n, tuple(terms))


def apply_split(rep: MonomialRep, j: int, c: int) -> MonomialRep:
    """Split term ``j`` at a vertex ``c`` that occurs in no other tail."""
    _check_index(rep, j)
    terms = _terms(rep)
    i, a = terms[j]
    if c not in a:
        raise MoveError("split vertex must be in the tail")
    if any(c in tail for k, (_, tail) in enumerate(terms) if k != j):
        raise MoveError("split vertex occurs in another tail")
    terms[j] = (i, a - {c})
    terms.append((c, a - {c}))
    return MonomialRep(rep.n, tuple(terms))


def apply_move(rep: MonomialRep, move: BinomialMove) -> MonomialRep:
    if move.kind == "within":
        assert move.j2 is not None
        return apply_within(rep, move.j1, move.j2, move.vertices)
    (c,) = move.vertices if move.kind in ("out_add", "out_del", "split") else (None,)
    if move.kind == "out_add":
        assert move.j2 is not None and c is not None
        return apply_out_add(rep, move.j1, move.j2, c)
    if move.kind == "out_del":
        assert move.j2 is not None and c is not None
        return apply_out_del(rep, move.j1, move.j2, c)
    if move.kind == "merge":
        assert move.j2 is not None
        return apply_merge(rep, move.j1, move.j2)
    if move.kind == "split":
        assert c is not None
        return apply_split(rep, move.j1, c)
    raise MoveError(f"unknown move kind {move.kind!r}")


def _subsets(items: frozenset[int]) -> Iterator[frozenset[int]]:
    ordered = sorted(items)
    return (frozenset(s) for s in chain.from_iterable(combinations(ordered, r) for r in range(len(ordered) + 1)))


def admissible_moves(rep: MonomialRep, kinds: tuple[MoveKind, ...] = MOVE_KINDS) -> Iterator[BinomialMove]:
    """Every admissible move of the requested kinds (within uses nonempty sets)."""
    terms = rep.terms
    k = len(terms)
    for j1 in range(k):
        for j2 in range(k):
            if j1 == j2:
                continue
            a1, a2 = terms[j1][1], terms[j2][1]
            if "within" in kinds:
                for moved in _subsets(a2 - a1):
                    if moved:
                        yield BinomialMove("within", j1, j2, moved)
            if "out_add" in kinds:
                for c in sorted(a1 - a2):
                    yield BinomialMove("out_add", j1, j2, frozenset({c}))
            if "out_del" in kinds:
                for c in sorted(a1 & a2):
                    yield BinomialMove("out_del", j1, j2, frozenset({c}))
            if "merge" in kinds and j1 < j2 and a1 == a2:
                yield BinomialMove("merge", j1, j2)
    if "split" in kinds:
        for j in range(k):
            others = frozenset().union(*(t for m, (_, t) in enumerate(terms) if m != j))
            for c in sorted(terms[j][1] - others):
                yield BinomialMove("split", j, None, frozenset({c}))


def neighbors(g: UndirectedGraph, kinds: tuple[MoveKind, ...] = MOVE_KINDS) -> set[UndirectedGraph]:
    """Graphs reachable by one move from any representation of ``g``."""
    out = set()
    for rep in all_monomial_reps(g):
        for move in admissible_moves(rep, kinds):
            out.add(apply_move(rep, move).realize())
    out.discard(g)
    return out


def fiber_equivalent(g: UndirectedGraph, h: UndirectedGraph) -> bool:
    """True when some representations of ``g`` and ``h`` share a sufficient statistic."""
    if g.n != h.n:
        return False
    stats = {sufficient_statistic(r) for r in all_monomial_reps(g)}
    return any(sufficient_statistic(r) in stats for r in all_monomial_reps(h))
