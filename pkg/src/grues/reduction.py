"""CPDAGs of maximal DAGs, DAG-reductions, and the moves that act on them.

A DAG-reduction collapses every chain component of the CPDAG into a node.
Edges are stored transitively closed, so ``children(i)`` is the full set of
descendants and ``parents(i)`` the full set of ancestors. The source nodes are
in bijection with the cliques of the minimum cover: the clique of a source is
the union of that source with all of its descendants.

Moves are applied by literal transcription of the merge, split and algebraic
procedures, followed by re-closing the edge set and sorting the nodes.
Proposal probabilities are exact: every pick tuple of the chosen move kind is
enumerated, and the probabilities of all tuples that lead to the same
destination are summed.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Literal, Mapping, Sequence

import numpy as np

from .graph import Cpdag, GraphError, UndirectedGraph
from .monomial import MOVE_KINDS, MoveKind
from .uec import NotUECError, _bits, edge_mask_from_cliques, is_uec_representative, min_edge_clique_cover

log = logging.getLogger(__name__)

DEBUG = os.environ.get("GRUES_DEBUG", "") == "1"

Fiber = Literal["within", "out_add", "out_del"]
INVERSE_KIND: dict[str, MoveKind] = {
    "merge": "split",
    "split": "merge",
    "out_add": "out_del",
    "out_del": "out_add",
    "within": "within",
}
DEFAULT_TRANSITIONS: dict[str, float] = {"merge": 1, "split": 1, "out_add": 1, "out_del": 1, "within": 2}


class MoveUnavailable(ValueError):
    """The picks do not satisfy the move's admissibility conditions."""


# ---------------------------------------------------------------------------
# CPDAG of the maximal DAGs


def init_cpdag(g: UndirectedGraph) -> Cpdag:
    """Orient every induced path a - b - c as a -> b <- c, then drop doubly oriented edges."""
    if not is_uec_representative(g):
        raise NotUECError(g)
    nbr = g.neighbor_masks()
    marks: dict[tuple[int, int], set[int]] = {e: set() for e in g.edges}
    for mid in range(g.n):
        ends = _bits(nbr[mid])
        for i, a in enumerate(ends):
            for c in ends[i + 1:]:
                if nbr[a] >> c & 1:
                    continue
                for end in (a, c):
                    marks[(min(end, mid), max(end, mid))].add(mid)
    directed, undirected = set(), set()
    for (a, b), heads in marks.items():
        if not heads:
            undirected.add((a, b))
        elif len(heads) == 1:
            (head,) = heads
            directed.add((a, b) if head == b else (b, a))
    return Cpdag(g.n, frozenset(directed), frozenset(undirected))


# ---------------------------------------------------------------------------
# Reduction type


@dataclass(frozen=True)
class DagReduction:
    """DAG on disjoint vertex sets (chain components) covering ``0..n-1``."""

    n: int
    nodes: tuple[tuple[int, ...], ...]
    edges: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        seen: list[int] = []
        for node in self.nodes:
            if not node:
                raise GraphError("empty reduction node")
            seen.extend(node)
        if sorted(seen) != list(range(self.n)):
            raise GraphError("reduction nodes must partition the vertex set")
        k = len(self.nodes)
        for a, b in self.edges:
            if not (0 <= a < k and 0 <= b < k) or a == b:
                raise GraphError(f"bad reduction edge {(a, b)}")
        if not _is_acyclic(k, self.edges):
            raise GraphError("reduction has a directed cycle")

    @classmethod
    def build(cls, n: int, nodes: Sequence[Iterable[int]], edges: Iterable[tuple[int, int]]) -> "DagReduction":
        """Sort nodes by content, remap and transitively close the edges."""
        keyed = [tuple(sorted(node)) for node in nodes]
        order = sorted(range(len(keyed)), key=lambda i: keyed[i])
        where = {old: new for new, old in enumerate(order)}
        remapped = {(where[a], where[b]) for a, b in edges}
        return cls(n, tuple(keyed[i] for i in order), frozenset(_closure(len(keyed), remapped)))

    # -- structure ---------------------------------------------------------

    @cached_property
    def parents(self) -> tuple[frozenset[int], ...]:
        out: list[set[int]] = [set() for _ in self.nodes]
        for a, b in self.edges:
            out[b].add(a)
        return tuple(frozenset(s) for s in out)

    @cached_property
    def children(self) -> tuple[frozenset[int], ...]:
        out: list[set[int]] = [set() for _ in self.nodes]
        for a, b in self.edges:
            out[a].add(b)
        return tuple(frozenset(s) for s in out)

    @cached_property
    def sources(self) -> tuple[int, ...]:
        return tuple(i for i, p in enumerate(self.parents) if not p)

    @cached_property
    def max_ancestors(self) -> tuple[frozenset[int], ...]:
        """Source nodes among each node's ancestors (a source is its own)."""
        src = set(self.sources)
        return tuple(
            frozenset({i}) if i in src else frozenset(p for p in self.parents[i] if p in src)
            for i in range(len(self.nodes))
        )

    @cached_property
    def node_of(self) -> tuple[int, ...]:
        out = [0] * self.n
        for i, node in enumerate(self.nodes):
            for v in node:
                out[v] = i
        return tuple(out)

    @cached_property
    def node_masks(self) -> tuple[int, ...]:
        return tuple(sum(1 << v for v in node) for node in self.nodes)

    @cached_property
    def clique_masks(self) -> dict[int, int]:
        """Vertex bitmask of the clique owned by each source node."""
        masks = self.node_masks
        return {s: masks[s] | sum(masks[c] for c in self.children[s]) for s in self.sources}

    @cached_property
    def edge_mask(self) -> int:
        return edge_mask_from_cliques(self.n, self.clique_masks.values())

    def level(self, i: int) -> int:
        return len(self.max_ancestors[i])

    def to_json(self) -> dict:
        return {"nodes": [list(node) for node in self.nodes], "edges": [list(e) for e in sorted(self.edges)]}

    @classmethod
    def from_json(cls, n: int, data: Mapping) -> "DagReduction":
        return cls.build(n, data["nodes"], (tuple(e) for e in data["edges"]))  # type: ignore[misc]


def _closure(k: int, edges: set[tuple[int, int]]) -> set[tuple[int, int]]:
    reach = [set() for _ in range(k)]
    for a, b in edges:
        reach[a].add(b)
    changed = True
    while changed:
        changed = False
        for a in range(k):
            extra = set().union(*(reach[b] for b in reach[a])) - reach[a] if reach[a] else set()
            if extra:
                reach[a] |= extra
                changed = True
    return {(a, b) for a in range(k) for b in reach[a]}


def _is_acyclic(k: int, edges: Iterable[tuple[int, int]]) -> bool:
    indeg = [0] * k
    out: list[list[int]] = [[] for _ in range(k)]
    for a, b in edges:
        indeg[b] += 1
        out[a].append(b)
    ready = [i for i in range(k) if indeg[i] == 0]
    count = 0
    while ready:
        i = ready.pop()
        count += 1
        for j in out[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                ready.append(j)
    return count == k


def to_dag_reduction(g: UndirectedGraph) -> DagReduction:
    """Collapse chain components of :func:`init_cpdag` and lift its directed edges."""
    cpdag = init_cpdag(g)
    comps = cpdag.chain_components()
    where = {v: i for i, comp in enumerate(comps) for v in comp}
    lifted = {(where[a], where[b]) for a, b in cpdag.directed}
    return DagReduction.build(g.n, comps, lifted)


def reduction_from_cliques(n: int, cliques: Iterable[Iterable[int]]) -> DagReduction:
    """Lattice construction: group vertices by the set of cliques containing them.

    Node ``a`` points to node ``b`` when ``a``'s clique set is a proper subset
    of ``b``'s. Assumes every clique owns a private vertex.
    """
    cliques = [frozenset(c) for c in cliques]
    member: dict[frozenset[int], list[int]] = {}
    for v in range(n):
        key = frozenset(j for j, c in enumerate(cliques) if v in c)
        member.setdefault(key, []).append(v)
    keys = list(member)
    edges = {(a, b) for a, ka in enumerate(keys) for b, kb in enumerate(keys) if ka < kb}
    return DagReduction.build(n, [member[k] for k in keys], edges)


def reconstruct_uec(d: DagReduction) -> UndirectedGraph:
    """Two vertices are adjacent iff their nodes share a source ancestor."""
    check_lattice(d)
    return UndirectedGraph.from_mask(d.n, d.edge_mask)


def check_lattice(d: DagReduction) -> None:
    """Raise :class:`GraphError` unless ``d`` has the lattice form of a valid reduction.

    Node clique-sets are distinct, edges are exactly the proper-subset
    relations between them, and every source node is a single clique.
    """
    ma = d.max_ancestors
    if len(set(ma)) != len(ma):
        raise GraphError("two reduction nodes share a source-ancestor set")
    for a in range(len(d.nodes)):
        for b in range(len(d.nodes)):
            if ((a, b) in d.edges) != (ma[a] < ma[b]):
                raise GraphError(f"edge {(a, b)} disagrees with the source-ancestor order")


# ---------------------------------------------------------------------------
# Algorithms 2-4


class _Work:
    """Mutable copy of a reduction; removed nodes become empty sets."""

    def __init__(self, d: DagReduction):
        self.n = d.n
        self.nodes = [set(node) for node in d.nodes]
        self.edges = set(d.edges)

    def add_node(self, vertices: Iterable[int]) -> int:
        self.nodes.append(set(vertices))
        return len(self.nodes) - 1

    def remove_node(self, i: int) -> None:
        self.nodes[i] = set()
        self.edges = {(a, b) for a, b in self.edges if i not in (a, b)}

    def finish(self) -> DagReduction:
        alive = [i for i, node in enumerate(self.nodes) if node]
        where = {old: new for new, old in enumerate(alive)}
        edges = {(where[a], where[b]) for a, b in self.edges if a in where and b in where}
        out = DagReduction.build(self.n, [self.nodes[i] for i in alive], edges)
        if DEBUG:
            check_lattice(out)
        return out


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise MoveUnavailable(message)


def merge_move(d: DagReduction, picks: tuple[int, int]) -> DagReduction:
    """Fuse two singleton sources with equal child sets.

    ``picks = (s, s2)`` are node indices. Children whose only parents are the
    two sources join the merged source.
    """
    s, s2 = picks
    src = set(d.sources)
    _require(s != s2 and s in src and s2 in src, "merge needs two distinct source nodes")
    _require(len(d.nodes[s]) == 1 and len(d.nodes[s2]) == 1, "merge needs singleton sources")
    _require(d.children[s] == d.children[s2], "merge needs equal child sets")
    w = _Work(d)
    w.nodes[s] |= w.nodes[s2]
    for c in d.children[s] & d.children[s2]:
        if len(d.parents[c]) == 2:
            w.nodes[s] |= w.nodes[c]
            w.remove_node(c)
    w.remove_node(s2)
    return w.finish()


def split_move(d: DagReduction, picks: tuple[int, int, int]) -> DagReduction:
    """Split a source node of size at least two.

    ``picks = (s, v, w)``: node index and two distinct vertices of it. Both
    vertices become singleton sources; any remaining vertices form a child node
    of both.
    """
    s, v, x = picks
    _require(s in d.sources and len(d.nodes[s]) >= 2, "split needs a source node with at least two vertices")
    _require(v != x and v in d.nodes[s] and x in d.nodes[s], "split needs two distinct vertices of the node")
    w = _Work(d)
    new_v = w.add_node({v})
    w.nodes[s].discard(v)
    if len(w.nodes[s]) == 1:
        for c in d.children[s]:
            w.edges.add((new_v, c))
    else:
        new_x = w.add_node({x})
        w.nodes[s].discard(x)
        for c in d.children[s]:
            w.edges.add((new_x, c))
        w.edges.add((new_x, s))
        w.edges.add((new_v, s))
    return w.finish()


def _algebraic_target(d: DagReduction, fiber: Fiber, picks: tuple) -> tuple[int, int, frozenset[int]]:
    """Validate picks and return (t, v, T)."""
    src = set(d.sources)
    ma = d.max_ancestors
    if fiber == "out_del":
        t, s, v = picks
        _require(0 <= t < len(d.nodes) and t not in src, "out_del needs a non-source node")
        _require(s in ma[t], "out_del source must be a source ancestor of the node")
        _require(v in d.nodes[t], "vertex must lie in the picked node")
        return t, v, ma[t] - {s}
    if fiber not in ("within", "out_add"):
        raise ValueError(f"unknown fiber {fiber!r}")
    s, s2, t, v = picks
    _require(s != s2 and s in src and s2 in src, "need two distinct source nodes")
    only_s = d.children[s] - d.children[s2]
    _require(len(d.nodes[s]) >= 2 or bool(only_s), "first source admits no node to move from")
    _require((t == s and len(d.nodes[s]) >= 2) or t in only_s, "node not admissible for these sources")
    _require(v in d.nodes[t], "vertex must lie in the picked node")
    target = ma[t] | {s2} if fiber == "out_add" else (ma[t] - {s}) | {s2}
    return t, v, target


def algebraic_move(d: DagReduction, fiber: Fiber, picks: tuple) -> DagReduction:
    """Move one vertex to the node whose source-ancestor set is ``T``.

    ``picks`` is ``(s, s2, t, v)`` for ``within``/``out_add`` and ``(t, s, v)``
    for ``out_del``; node indices refer to ``d``.
    """
    t, v, target = _algebraic_target(d, fiber, picks)
    ma = d.max_ancestors
    w = _Work(d)
    match = [i for i in range(len(d.nodes)) if ma[i] == target]
    if match:
        w.nodes[match[0]].add(v)
    else:
        new = w.add_node({v})
        for p in range(len(d.nodes)):
            if ma[p] < target:
                w.edges.add((p, new))
            elif ma[p] > target:
                w.edges.add((new, p))
    w.nodes[t].discard(v)
    if not w.nodes[t]:
        w.remove_node(t)
    return w.finish()


def apply_picks(d: DagReduction, kind: MoveKind, picks: tuple) -> DagReduction:
    if kind == "merge":
        return merge_move(d, picks)  # type: ignore[arg-type]
    if kind == "split":
        return split_move(d, picks)  # type: ignore[arg-type]
    return algebraic_move(d, kind, picks)  # type: ignore[arg-type]


# ---------------------------------------------------------------------------
# Pick enumeration and proposal kernel


@dataclass(frozen=True)
class PickOption:
    picks: tuple
    prob: float
    dest_mask: int


@dataclass(frozen=True)
class MoveProposal:
    """A proposed move.

    ``pick_prob`` is the product of the uniform choice probabilities of the
    realized picks. ``forward_prob`` and ``reverse_prob`` are the full kernel
    probabilities ``q(u, u')`` and ``q(u', u)``: kind probability times the
    summed probability of all pick tuples reaching the same destination.
    """

    kind: MoveKind
    picks: tuple
    pick_prob: float
    forward_prob: float
    reverse_prob: float
    dest_mask: int


def _mask_after_cliques(n: int, cliques: Iterable[int]) -> int:
    return edge_mask_from_cliques(n, cliques)


def available_kinds(d: DagReduction) -> list[MoveKind]:
    src = d.sources
    out: list[MoveKind] = []
    if _merge_pairs(d):
        out.append("merge")
    if any(len(d.nodes[s]) >= 2 for s in src):
        out.append("split")
    algebraic = any(_t_candidates(d, s, s2) for s in src for s2 in src if s != s2)
    if algebraic:
        out.append("out_add")
    if len(src) < len(d.nodes):
        out.append("out_del")
    if algebraic:
        out.append("within")
    return out


def _merge_pairs(d: DagReduction) -> list[tuple[int, int]]:
    src = [s for s in d.sources if len(d.nodes[s]) == 1]
    return [
        (a, b) for i, a in enumerate(src) for b in src[i + 1:] if d.children[a] == d.children[b]
    ]


def _t_candidates(d: DagReduction, s: int, s2: int) -> list[int]:
    out = [s] if len(d.nodes[s]) >= 2 else []
    out.extend(sorted(d.children[s] - d.children[s2]))
    return out


def enumerate_picks(d: DagReduction, kind: MoveKind) -> list[PickOption]:
    """Every pick tuple of ``kind`` with its probability and destination edge mask.

    Probabilities follow the nested uniform choices of the procedure and sum to
    one when the kind is available.
    """
    n = d.n
    cl = d.clique_masks
    out: list[PickOption] = []
    if kind == "merge":
        pairs = _merge_pairs(d)
        for a, b in pairs:
            rest = [m for s, m in cl.items() if s not in (a, b)]
            out.append(PickOption((a, b), 1 / len(pairs), _mask_after_cliques(n, rest + [cl[a] | cl[b]])))
        return out
    if kind == "split":
        big = [s for s in d.sources if len(d.nodes[s]) >= 2]
        for s in big:
            node = d.nodes[s]
            rest = [m for j, m in cl.items() if j != s]
            for v in node:
                for x in node:
                    if x == v:
                        continue
                    prob = 1 / len(big) / len(node) / (len(node) - 1)
                    dest = _mask_after_cliques(n, rest + [cl[s] & ~(1 << x), cl[s] & ~(1 << v)])
                    out.append(PickOption((s, v, x), prob, dest))
        return out
    ma = d.max_ancestors
    src = d.sources

    def moved(v: int, target: frozenset[int]) -> int:
        bit = 1 << v
        return _mask_after_cliques(n, [(m | bit) if s in target else (m & ~bit) for s, m in cl.items()])

    if kind == "out_del":
        ts = [t for t in range(len(d.nodes)) if t not in set(src)]
        for t in ts:
            for s in sorted(ma[t]):
                target = ma[t] - {s}
                for v in d.nodes[t]:
                    prob = 1 / len(ts) / len(ma[t]) / len(d.nodes[t])
                    out.append(PickOption((t, s, v), prob, moved(v, target)))
        return out
    if kind not in ("within", "out_add"):
        raise ValueError(f"unknown move kind {kind!r}")
    pairs = [(s, s2) for s in src for s2 in src if s != s2 and _t_candidates(d, s, s2)]
    for s, s2 in pairs:
        ts = _t_candidates(d, s, s2)
        for t in ts:
            target = ma[t] | {s2} if kind == "out_add" else (ma[t] - {s}) | {s2}
            for v in d.nodes[t]:
                prob = 1 / len(pairs) / len(ts) / len(d.nodes[t])
                out.append(PickOption((s, s2, t, v), prob, moved(v, target)))
    return out


class _Transitions(dict):
    """A transition pmf that has already been validated and normalized."""


def normalize_transitions(transitions: Mapping[str, float] | Sequence[float] | None) -> dict[str, float]:
    """Accept a kind->weight mapping or a 5-sequence in merge:split:out_add:out_del:within order."""
    if isinstance(transitions, _Transitions):
        return transitions
    if transitions is None:
        transitions = DEFAULT_TRANSITIONS
    if not isinstance(transitions, Mapping):
        values = list(transitions)
        if len(values) != 5:
            raise ValueError("transitions need five weights (merge, split, out_add, out_del, within)")
        transitions = dict(zip(MOVE_KINDS, values))
    unknown = set(transitions) - set(MOVE_KINDS)
    if unknown:
        raise ValueError(f"unknown move kinds {sorted(unknown)}")
    weights = {k: float(transitions.get(k, 0.0)) for k in MOVE_KINDS}
    if any(w < 0 or not np.isfinite(w) for w in weights.values()) or sum(weights.values()) <= 0:
        raise ValueError("transition weights must be finite, nonnegative and not all zero")
    total = sum(weights.values())
    return _Transitions((k, w / total) for k, w in weights.items())


def kind_probability(d: DagReduction, kind: MoveKind, transitions: Mapping[str, float]) -> float:
    kinds = [k for k in available_kinds(d) if transitions[k] > 0]
    if kind not in kinds:
        return 0.0
    return transitions[kind] / sum(transitions[k] for k in kinds)


def transition_probability(
    d: DagReduction, dest_mask: int, kind: MoveKind, transitions: Mapping[str, float]
) -> float:
    """q(d, dest) restricted to moves of ``kind``."""
    pk = kind_probability(d, kind, transitions)
    if pk == 0.0:
        return 0.0
    return pk * sum(o.prob for o in enumerate_picks(d, kind) if o.dest_mask == dest_mask)


# Reductions are immutable and canonical, so per-state move tables can be
# shared across steps and chains.


@lru_cache(maxsize=1 << 14)
def _kinds_of(d: DagReduction) -> tuple[MoveKind, ...]:
    return tuple(available_kinds(d))


@lru_cache(maxsize=1 << 14)
def _picks_of(d: DagReduction, kind: MoveKind) -> tuple[tuple[PickOption, ...], dict[int, float]]:
    options = tuple(enumerate_picks(d, kind))
    by_dest: dict[int, float] = {}
    for o in options:
        by_dest[o.dest_mask] = by_dest.get(o.dest_mask, 0) + o.prob
    return options, by_dest


@lru_cache(maxsize=1 << 16)
def _applied(d: DagReduction, kind: MoveKind, picks: tuple) -> DagReduction:
    return apply_picks(d, kind, picks)


def clear_move_cache() -> None:
    """Drop the shared per-state move tables (used for cold timing)."""
    for fn in (_kinds_of, _picks_of, _applied):
        fn.cache_clear()


def propose_random_move(
    d: DagReduction,
    transitions: Mapping[str, float] | Sequence[float] | None,
    rng: np.random.Generator,
) -> tuple[MoveProposal, DagReduction]:
    """Draw a move kind, then its picks uniformly level by level, and apply it."""
    probs = normalize_transitions(transitions)
    kinds = [k for k in _kinds_of(d) if probs[k] > 0]
    if not kinds:
        raise MoveUnavailable("no move kind is available from this state")
    weights = np.array([probs[k] for k in kinds])
    kind = kinds[_categorical(weights, rng)]
    options, by_dest = _picks_of(d, kind)
    choice = _draw_nested(options, rng)
    new = _applied(d, kind, choice.picks)
    if new.edge_mask != choice.dest_mask:
        raise AssertionError(f"{kind} picks {choice.picks} reached an unexpected graph")
    forward = probs[kind] / weights.sum() * by_dest[choice.dest_mask]
    back = INVERSE_KIND[kind]
    back_kinds = [k for k in _kinds_of(new) if probs[k] > 0]
    reverse = 0.0
    if back in back_kinds:
        p_back = probs[back] / sum(probs[k] for k in back_kinds)
        reverse = p_back * _picks_of(new, back)[1].get(d.edge_mask, 0)
    if reverse == 0.0:
        log.warning("%s move %s has no reverse pick; proposal will be rejected", kind, choice.picks)
    return MoveProposal(kind, choice.picks, choice.prob, forward, reverse, choice.dest_mask), new


def _draw_nested(options: Sequence[PickOption], rng: np.random.Generator) -> PickOption:
    # Nested uniform picks multiply out to option.prob, so one categorical
    # draw over the flattened options has the same law.
    return options[_categorical(np.array([o.prob for o in options]), rng)]


def _categorical(weights: np.ndarray, rng: np.random.Generator) -> int:
    # same draw as rng.choice(len(weights), p=...), without its validation overhead
    cdf = np.cumsum(weights)
    cdf /= cdf[-1]
    return int(cdf.searchsorted(rng.random(), side="right"))
