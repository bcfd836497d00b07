"""Pairwise marginal independence tests and UEC-representative subgraphs."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .graph import UndirectedGraph, pair_list
from .uec import _bits, _simplicial_groups, edge_mask_from_cliques, is_uec_representative

EXACT_LIMIT = 8


@dataclass(frozen=True)
class TestConfig:
    """Level of the two-sided Fisher z test on the product-moment correlation."""

    __test__ = False  # not a pytest class

    alpha: float = 0.05

    def __post_init__(self) -> None:
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie strictly between 0 and 1")


def fisher_z_pvalue(r: float, n_samples: int) -> float:
    """Two-sided p-value of ``atanh(r) * sqrt(N - 3)`` under the standard normal."""
    if n_samples < 4:
        raise ValueError("Fisher z needs at least 4 samples")
    r = min(max(r, -1.0), 1.0)
    if abs(r) == 1.0:
        return 0.0
    z = math.atanh(r) * math.sqrt(n_samples - 3)
    return math.erfc(abs(z) / math.sqrt(2.0))


def marginal_independence_graph(x: np.ndarray, cfg: TestConfig | None = None) -> UndirectedGraph:
    """Join ``i`` and ``j`` when the test rejects zero correlation at ``cfg.alpha``.

    Constant columns have undefined correlation; they get no edges and a
    warning is emitted.
    """
    cfg = cfg or TestConfig()
    values = getattr(x, "values", x)
    values = np.asarray(values, dtype=float)
    big_n, n = values.shape
    if big_n < 4:
        raise ValueError("Fisher z needs at least 4 samples")
    centered = values - values.mean(axis=0)
    norms = np.sqrt((centered**2).sum(axis=0))
    constant = [j for j in range(n) if norms[j] <= 1e-12 * max(1.0, np.abs(values[:, j]).max())]
    if constant:
        warnings.warn(f"constant columns {constant} treated as independent of all others", stacklevel=2)
    edges = []
    for i, j in pair_list(n):
        if i in constant or j in constant:
            continue
        r = float(centered[:, i] @ centered[:, j] / (norms[i] * norms[j]))
        if fisher_z_pvalue(r, big_n) < cfg.alpha:
            edges.append((i, j))
    return UndirectedGraph.from_edges(n, edges)


# ---------------------------------------------------------------------------
# Largest UEC-representative subgraph


def uncovered_edge_count(g: UndirectedGraph) -> int:
    """Edges missed by the clique-valued closed neighborhoods; zero iff ``g`` is a UEC-representative."""
    covered = edge_mask_from_cliques(g.n, _simplicial_groups(g).keys())
    return bin(g.mask & ~covered).count("1")


def greedy_uec_subgraph(g: UndirectedGraph) -> UndirectedGraph:
    """Delete edges greedily until recognition succeeds, then re-add what fits.

    Each step deletes the edge whose removal leaves the fewest uncovered edges
    (lowest pair first on ties). The final pass makes the result edge-maximal.
    """
    current = g
    deleted = []
    while not is_uec_representative(current):
        best = None
        for e in sorted(current.edges):
            trial = UndirectedGraph(g.n, current.edges - {e})
            cost = uncovered_edge_count(trial)
            if best is None or cost < best[0]:
                best = (cost, e, trial)
        assert best is not None
        deleted.append(best[1])
        current = best[2]
    for e in deleted:
        trial = UndirectedGraph(g.n, current.edges | {e})
        if is_uec_representative(trial):
            current = trial
    return current


def _exact_uec_subgraph(g: UndirectedGraph, incumbent: UndirectedGraph) -> UndirectedGraph:
    """Branch and bound over center sets and clique memberships.

    A UEC-representative subgraph is fixed by a set of centers and, for every
    other vertex, a nonempty set of centers whose cliques it joins. Each clique
    must stay complete in ``g``.
    """
    n = g.n
    nbr = g.neighbor_masks()
    table = _pair_bits(n)
    best_mask = incumbent.mask
    best_count = bin(best_mask).count("1")
    full = (1 << n) - 1

    for centers in range(1, full + 1):
        others = _bits(full & ~centers)
        if any(not nbr[v] & centers for v in others):
            continue
        # g-edges still undecided once the first idx non-centers are placed
        rem = [0] * (len(others) + 1)
        for idx in range(len(others) - 1, -1, -1):
            v = others[idx]
            rem[idx] = rem[idx + 1] | _star(table, v, nbr[v])
        members = {m: 1 << m for m in _bits(centers)}

        def dfs(idx: int, cur: int) -> None:
            nonlocal best_mask, best_count
            if bin(cur | rem[idx]).count("1") <= best_count:
                return
            if idx == len(others):
                best_mask, best_count = cur, bin(cur).count("1")
                return
            v = others[idx]
            allowed = [m for m in _bits(nbr[v] & centers) if members[m] & ~nbr[v] == 0]
            # try larger membership sets first to find good incumbents early
            for size in range(len(allowed), 0, -1):
                for combo in combinations(allowed, size):
                    gained = 0
                    for m in combo:
                        gained |= members[m]
                    for m in combo:
                        members[m] |= 1 << v
                    dfs(idx + 1, cur | _star(table, v, gained))
                    for m in combo:
                        members[m] &= ~(1 << v)

        dfs(0, 0)
    return UndirectedGraph.from_mask(n, best_mask)


def _pair_bits(n: int) -> dict[tuple[int, int], int]:
    return {p: 1 << k for k, p in enumerate(pair_list(n))}


def _star(table: dict[tuple[int, int], int], v: int, others: int) -> int:
    out = 0
    for u in _bits(others):
        out |= table[(min(u, v), max(u, v))]
    return out


def largest_uec_subgraph(g: UndirectedGraph, exact_limit: int = EXACT_LIMIT) -> UndirectedGraph:
    """Edge subgraph of ``g`` that is a UEC-representative.

    Exact (most edges, ties resolved by search order) for ``n <= exact_limit``;
    greedy and edge-maximal above that.
    """
    if is_uec_representative(g):
        return g
    greedy = greedy_uec_subgraph(g)
    if g.n > exact_limit:
        return greedy
    return _exact_uec_subgraph(g, greedy)
