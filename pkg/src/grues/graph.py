"""Vertex-indexed graph types and unconditional dependence graphs.

Vertices are ``0..n-1``. All graph values are immutable and hashable, so they
can be used as dictionary keys and shared between threads.

Two DAG vertices are joined in the unconditional dependence graph exactly when
they share a common ancestor (a vertex counts as its own ancestor). Four
independent routes to that graph are provided through :func:`udg`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Iterator, Literal

Pair = tuple[int, int]

UdgMethod = Literal["ancestors", "max_ancestors", "moral_trans_rev", "matrix"]
UDG_METHODS: tuple[UdgMethod, ...] = ("ancestors", "max_ancestors", "moral_trans_rev", "matrix")


class GraphError(ValueError):
    """Raised for malformed graphs (self-loops, bad vertex ids, cycles)."""


class CycleError(GraphError):
    """Raised when an operation requires an acyclic graph."""


def _check_vertex(n: int, v: int) -> None:
    if not 0 <= v < n:
        raise GraphError(f"vertex {v} out of range for n={n}")


@lru_cache(maxsize=None)
def pair_index(n: int) -> dict[Pair, int]:
    """Bit position of each unordered pair, in the order (0,1), (0,2), ..., (n-2,n-1)."""
    return {pair: k for k, pair in enumerate(combinations(range(n), 2))}


@lru_cache(maxsize=None)
def pair_list(n: int) -> tuple[Pair, ...]:
    return tuple(combinations(range(n), 2))


@dataclass(frozen=True)
class UndirectedGraph:
    """Simple undirected graph on vertices ``0..n-1``.

    Edges are stored as canonical ``(min, max)`` pairs.
    """

    n: int
    edges: frozenset[Pair] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if self.n < 0:
            raise GraphError("vertex count must be nonnegative")
        canon = set()
        for a, b in self.edges:
            _check_vertex(self.n, a)
            _check_vertex(self.n, b)
            if a == b:
                raise GraphError(f"self-loop at {a}")
            canon.add((min(a, b), max(a, b)))
        object.__setattr__(self, "edges", frozenset(canon))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Iterable[int]]) -> "UndirectedGraph":
        return cls(n, frozenset(tuple(e) for e in edges))  # type: ignore[misc]

    @classmethod
    def complete(cls, n: int) -> "UndirectedGraph":
        return cls(n, frozenset(pair_list(n)))

    @classmethod
    def empty(cls, n: int) -> "UndirectedGraph":
        return cls(n)

    @classmethod
    def from_cliques(cls, n: int, cliques: Iterable[Iterable[int]]) -> "UndirectedGraph":
        """Union of complete graphs on the given vertex sets."""
        edges: set[Pair] = set()
        for clique in cliques:
            edges.update(combinations(sorted(set(clique)), 2))
        return cls(n, frozenset(edges))

    @classmethod
    def from_mask(cls, n: int, mask: int) -> "UndirectedGraph":
        pairs = pair_list(n)
        if mask < 0 or mask >> len(pairs):
            raise GraphError(f"edge mask {mask:#x} does not fit n={n}")
        return cls(n, frozenset(p for k, p in enumerate(pairs) if mask >> k & 1))

    @property
    def mask(self) -> int:
        """Edge-indicator bitmask; bit k is the k-th pair of :func:`pair_index`."""
        index = pair_index(self.n)
        out = 0
        for e in self.edges:
            out |= 1 << index[e]
        return out

    def has_edge(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.edges

    def neighbors(self, v: int) -> frozenset[int]:
        return frozenset(b if a == v else a for a, b in self.edges if v in (a, b))

    def closed_neighborhood(self, v: int) -> frozenset[int]:
        return self.neighbors(v) | {v}

    def adjacency(self) -> list[list[int]]:
        adj = [[0] * self.n for _ in range(self.n)]
        for a, b in self.edges:
            adj[a][b] = adj[b][a] = 1
        return adj

    def neighbor_masks(self) -> list[int]:
        """Bitmask of the open neighborhood of every vertex."""
        out = [0] * self.n
        for a, b in self.edges:
            out[a] |= 1 << b
            out[b] |= 1 << a
        return out

    def complement(self) -> "UndirectedGraph":
        return UndirectedGraph(self.n, frozenset(pair_list(self.n)) - self.edges)

    def is_clique(self, vertices: Iterable[int]) -> bool:
        return all(self.has_edge(a, b) for a, b in combinations(sorted(set(vertices)), 2))

    def to_json(self) -> dict:
        return {"n": self.n, "undirected": [list(e) for e in sorted(self.edges)]}

    def __repr__(self) -> str:
        return f"UndirectedGraph(n={self.n}, edges={sorted(self.edges)})"


@dataclass(frozen=True)
class Dag:
    """Directed acyclic graph; edges are ``(parent, child)`` pairs."""

    n: int
    edges: frozenset[Pair] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        for a, b in self.edges:
            _check_vertex(self.n, a)
            _check_vertex(self.n, b)
            if a == b:
                raise GraphError(f"self-loop at {a}")
        object.__setattr__(self, "edges", frozenset((int(a), int(b)) for a, b in self.edges))
        topological_order(self.n, self.edges)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Iterable[int]]) -> "Dag":
        return cls(n, frozenset(tuple(e) for e in edges))  # type: ignore[misc]

    def parents(self, v: int) -> frozenset[int]:
        return frozenset(a for a, b in self.edges if b == v)

    def children(self, v: int) -> frozenset[int]:
        return frozenset(b for a, b in self.edges if a == v)

    def sources(self) -> list[int]:
        has_parent = {b for _, b in self.edges}
        return [v for v in range(self.n) if v not in has_parent]

    def ancestors(self, v: int) -> frozenset[int]:
        """Ancestors of ``v``, including ``v`` itself."""
        return _reach(v, self._parent_lists())

    def descendants(self, v: int) -> frozenset[int]:
        """Descendants of ``v``, including ``v`` itself."""
        return _reach(v, self._child_lists())

    def max_ancestors(self, v: int) -> frozenset[int]:
        """Source vertices among the ancestors of ``v``."""
        src = set(self.sources())
        return frozenset(a for a in self.ancestors(v) if a in src)

    def topological_order(self) -> list[int]:
        return topological_order(self.n, self.edges)

    def _parent_lists(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.n)]
        for a, b in self.edges:
            out[b].append(a)
        return out

    def _child_lists(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.n)]
        for a, b in self.edges:
            out[a].append(b)
        return out

    def to_json(self) -> dict:
        return {"n": self.n, "directed": [list(e) for e in sorted(self.edges)]}


@dataclass(frozen=True)
class Cpdag:
    """Partially directed graph with disjoint directed and undirected parts."""

    n: int
    directed: frozenset[Pair] = field(default_factory=frozenset)
    undirected: frozenset[Pair] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        und = frozenset((min(a, b), max(a, b)) for a, b in self.undirected)
        for a, b in list(self.directed) + list(und):
            _check_vertex(self.n, a)
            _check_vertex(self.n, b)
            if a == b:
                raise GraphError(f"self-loop at {a}")
        skel_dir = {(min(a, b), max(a, b)) for a, b in self.directed}
        if len(skel_dir) != len(self.directed):
            raise GraphError("pair oriented both ways")
        if skel_dir & und:
            raise GraphError("pair is both directed and undirected")
        object.__setattr__(self, "undirected", und)
        object.__setattr__(self, "directed", frozenset(self.directed))

    def skeleton(self) -> UndirectedGraph:
        return UndirectedGraph(self.n, self.undirected | {(min(a, b), max(a, b)) for a, b in self.directed})

    def parents(self, v: int) -> frozenset[int]:
        return frozenset(a for a, b in self.directed if b == v)

    def undirected_neighbors(self, v: int) -> frozenset[int]:
        return frozenset(b if a == v else a for a, b in self.undirected if v in (a, b))

    def chain_components(self) -> list[tuple[int, ...]]:
        """Connected components of the undirected part, sorted."""
        seen: set[int] = set()
        comps = []
        for v in range(self.n):
            if v in seen:
                continue
            stack, comp = [v], set()
            while stack:
                u = stack.pop()
                if u in comp:
                    continue
                comp.add(u)
                stack.extend(self.undirected_neighbors(u) - comp)
            seen |= comp
            comps.append(tuple(sorted(comp)))
        return sorted(comps)

    def chain_component(self, v: int) -> tuple[int, ...]:
        for comp in self.chain_components():
            if v in comp:
                return comp
        raise GraphError(f"vertex {v} missing")  # pragma: no cover

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "directed": [list(e) for e in sorted(self.directed)],
            "undirected": [list(e) for e in sorted(self.undirected)],
        }


@dataclass(frozen=True)
class CountMatrix:
    """Square matrix of arbitrary-precision nonnegative integers."""

    entries: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij: Pair) -> int:
        i, j = ij
        return self.entries[i][j]

    def to_list(self) -> list[list[int]]:
        return [list(row) for row in self.entries]

    def transpose(self) -> "CountMatrix":
        return CountMatrix(tuple(zip(*self.entries)))

    def __matmul__(self, other: "CountMatrix") -> "CountMatrix":
        cols = list(zip(*other.entries))
        return CountMatrix(
            tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in cols) for row in self.entries)
        )

    def is_symmetric(self) -> bool:
        return self.entries == self.transpose().entries


def topological_order(n: int, edges: Iterable[Pair]) -> list[int]:
    """Kahn's algorithm with smallest-index tie-breaking; raises on cycles."""
    indeg = [0] * n
    children: list[list[int]] = [[] for _ in range(n)]
    for a, b in edges:
        indeg[b] += 1
        children[a].append(b)
    ready = sorted(v for v in range(n) if indeg[v] == 0)
    order = []
    while ready:
        v = ready.pop(0)
        order.append(v)
        for c in children[v]:
            indeg[c] -= 1
            if indeg[c] == 0:
                ready.append(c)
        ready.sort()
    if len(order) != n:
        raise CycleError("graph contains a directed cycle")
    return order


def _reach(v: int, lists: list[list[int]]) -> frozenset[int]:
    seen = {v}
    stack = [v]
    while stack:
        u = stack.pop()
        for w in lists[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return frozenset(seen)


def _as_dag(dag: Dag) -> Dag:
    if not isinstance(dag, Dag):
        raise TypeError(f"expected Dag, got {type(dag).__name__}")
    return dag


# ---------------------------------------------------------------------------
# Operators on DAGs


def transitive_closure(dag: Dag) -> Dag:
    dag = _as_dag(dag)
    edges = {(a, d) for d in range(dag.n) for a in dag.ancestors(d) if a != d}
    return Dag(dag.n, frozenset(edges))


def reversal(dag: Dag) -> Dag:
    dag = _as_dag(dag)
    return Dag(dag.n, frozenset((b, a) for a, b in dag.edges))


def moralization(dag: Dag) -> UndirectedGraph:
    """Drop orientations and marry every pair of co-parents."""
    dag = _as_dag(dag)
    edges: set[Pair] = {(min(a, b), max(a, b)) for a, b in dag.edges}
    for v in range(dag.n):
        edges.update(combinations(sorted(dag.parents(v)), 2))
    return UndirectedGraph(dag.n, frozenset(edges))


def dag_operators(dag: Dag) -> dict[str, Dag | UndirectedGraph]:
    return {
        "transitive_closure": transitive_closure(dag),
        "reversal": reversal(dag),
        "moralization": moralization(dag),
    }


def adjacency_counts(dag: Dag) -> CountMatrix:
    rows = [[0] * dag.n for _ in range(dag.n)]
    for a, b in dag.edges:
        rows[a][b] = 1
    return CountMatrix(tuple(tuple(r) for r in rows))


def path_count_matrix(dag: Dag) -> CountMatrix:
    """Entry (i, j) counts directed paths from i to j; the diagonal is 1.

    Computed as the sum of adjacency powers 0..n-1 with Python integers, so
    large counts never overflow.
    """
    dag = _as_dag(dag)
    n = dag.n
    adj = adjacency_counts(dag)
    identity = CountMatrix(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))
    total = [list(r) for r in identity.entries]
    power = identity
    for _ in range(1, n):
        power = power @ adj
        for i in range(n):
            for j in range(n):
                total[i][j] += power.entries[i][j]
    return CountMatrix(tuple(tuple(r) for r in total))


def colliderless_walk_counts(dag: Dag) -> CountMatrix:
    """Return T^T T where T is the path-count matrix."""
    t = path_count_matrix(dag)
    return t.transpose() @ t


# ---------------------------------------------------------------------------
# Unconditional dependence graph


def _udg_ancestors(dag: Dag) -> UndirectedGraph:
    anc = [dag.ancestors(v) for v in range(dag.n)]
    return UndirectedGraph(
        dag.n, frozenset((a, b) for a, b in pair_list(dag.n) if anc[a] & anc[b])
    )


def _udg_max_ancestors(dag: Dag) -> UndirectedGraph:
    cliques = [dag.descendants(s) for s in dag.sources()]
    return UndirectedGraph.from_cliques(dag.n, cliques)


def _udg_moral_trans_rev(dag: Dag) -> UndirectedGraph:
    return moralization(transitive_closure(reversal(dag)))


def _udg_matrix(dag: Dag) -> UndirectedGraph:
    u = colliderless_walk_counts(dag)
    return UndirectedGraph(
        dag.n, frozenset((a, b) for a, b in pair_list(dag.n) if u[a, b] != 0)
    )


_UDG_IMPL = {
    "ancestors": _udg_ancestors,
    "max_ancestors": _udg_max_ancestors,
    "moral_trans_rev": _udg_moral_trans_rev,
    "matrix": _udg_matrix,
}


def udg(dag: Dag, method: UdgMethod = "ancestors") -> UndirectedGraph:
    """Unconditional dependence graph of ``dag``.

    Parameters
    ----------
    dag : Dag
        Acyclic input (acyclicity is enforced on construction).
    method : {"ancestors", "max_ancestors", "moral_trans_rev", "matrix"}
        ``ancestors``: shared ancestor test. ``max_ancestors``: union of cliques
        on the descendants of each source. ``moral_trans_rev``: moralize the
        transitive closure of the reversed DAG. ``matrix``: nonzero pattern of
        the colliderless walk counts.
    """
    dag = _as_dag(dag)
    try:
        impl = _UDG_IMPL[method]
    except KeyError:
        raise ValueError(f"unknown udg method {method!r}") from None
    return impl(dag)


# ---------------------------------------------------------------------------
# JSON


def graph_from_json(data: dict | str) -> UndirectedGraph | Dag | Cpdag:
    """Parse graph JSON. Only-directed gives a Dag, only-undirected an UndirectedGraph."""
    if isinstance(data, str):
        data = json.loads(data)
    if not isinstance(data, dict) or "n" not in data:
        raise GraphError("graph JSON needs an integer field 'n'")
    n = data["n"]
    if not isinstance(n, int):
        raise GraphError("'n' must be an integer")
    directed = data.get("directed")
    undirected = data.get("undirected")
    for name, value in (("directed", directed), ("undirected", undirected)):
        if value is not None and not all(
            isinstance(e, (list, tuple)) and len(e) == 2 and all(isinstance(x, int) for x in e)
            for e in value
        ):
            raise GraphError(f"'{name}' must be a list of integer pairs")
    if directed is None:
        return UndirectedGraph.from_edges(n, undirected or [])
    if undirected is None:
        return Dag.from_edges(n, directed)
    return Cpdag(n, frozenset(tuple(e) for e in directed), frozenset(tuple(e) for e in undirected))  # type: ignore[misc]


def iter_pairs(n: int) -> Iterator[Pair]:
    return iter(pair_list(n))
