"""Metropolis-Hastings search over UEC-representatives.

The chain moves between DAG-reductions using the proposal kernel of
:mod:`grues.reduction`. States are scored with a Gaussian likelihood fitted on
the CPDAG of maximal DAGs, and the best penalized score seen among all
proposals is tracked alongside the chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal, Mapping, Protocol, Sequence

import numpy as np

from .graph import UndirectedGraph
from .reduction import (
    DagReduction,
    MoveProposal,
    available_kinds,
    init_cpdag,
    normalize_transitions,
    propose_random_move,
    to_dag_reduction,
)
from .uec import NotUECError, id_to_graph, is_uec_representative, mask_to_id, min_edge_clique_cover

ScoreKind = Literal["l0", "nuclear"]
VARIANCE_FLOOR = 1e-12
RIDGE_SCALE = 1e-8


# ---------------------------------------------------------------------------
# Data


@dataclass(frozen=True)
class DataMatrix:
    """Column-centered observations, ``N`` rows by ``n`` variables."""

    values: np.ndarray

    def __post_init__(self) -> None:
        x = np.asarray(self.values, dtype=float)
        if x.ndim != 2:
            raise ValueError("data must be a 2-d array")
        big_n, n = x.shape
        if big_n < n + 2:
            raise ValueError(f"need at least n + 2 = {n + 2} rows, got {big_n}")
        if not np.all(np.isfinite(x)):
            raise ValueError("data contains non-finite values")
        x = x - x.mean(axis=0)
        x.setflags(write=False)
        object.__setattr__(self, "values", x)

    @property
    def N(self) -> int:  # noqa: N802
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]


# ---------------------------------------------------------------------------
# Prior


def delta_weights(n: int, s: int, p: float) -> np.ndarray:
    """Unnormalized triangle weights d_1..d_n peaked at ``s`` and raised to ``p``."""
    if n < 1 or not 1 <= s <= n or p <= 0:
        raise ValueError(f"need 1 <= s <= n and p > 0 (got n={n}, s={s}, p={p})")
    m = n + 1
    d = []
    for i in range(1, n + 1):
        if i < s:
            base = 2 * i / (m * s)
        elif i == s:
            base = 2 / m
        else:
            base = 2 * (m - i) / (m * (m - s))
        d.append(base**p)
    return np.array(d)


def delta_prior_log(n: int, s: int, p: float, source_count: int) -> float:
    """Log prior mass assigned to any graph with ``source_count`` cliques."""
    if not 1 <= source_count <= n:
        raise ValueError(f"source_count must be in 1..{n}")
    d = delta_weights(n, s, p)
    return float(math.log(d[source_count - 1] / d.sum()))


@dataclass(frozen=True)
class Prior:
    """``uniform`` or ``delta`` (triangle over source counts with peak ``s`` and exponent ``p``)."""

    kind: Literal["uniform", "delta"] = "uniform"
    s: int = 1
    p: float = 1.0

    def log_prior(self, n: int, source_count: int) -> float:
        if self.kind == "uniform":
            return 0.0
        if self.kind == "delta":
            return delta_prior_log(n, self.s, self.p, source_count)
        raise ValueError(f"unknown prior kind {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "Prior":
        """Parse ``uniform`` or ``delta:S:P``."""
        if text == "uniform":
            return cls()
        parts = text.split(":")
        if len(parts) == 3 and parts[0] == "delta":
            return cls("delta", int(parts[1]), float(parts[2]))
        raise ValueError(f"cannot parse prior {text!r}; expected 'uniform' or 'delta:S:P'")

    def __str__(self) -> str:
        return "uniform" if self.kind == "uniform" else f"delta:{self.s}:{self.p:g}"


# ---------------------------------------------------------------------------
# Likelihood


RegressionMode = Literal["ordered", "component"]


def regressor_sets(g: UndirectedGraph, mode: RegressionMode = "component") -> list[tuple[int, ...]]:
    """Regressors of every vertex, read off the CPDAG of maximal DAGs.

    ``ordered``: CPDAG parents plus the lower-indexed members of the vertex's
    chain component. Chain components here are cliques, so this is the
    factorization of one maximal DAG and gives a proper likelihood.
    ``component``: CPDAG parents plus every other member of the component.
    Dependencies inside a component are then counted once per member.
    """
    cpdag = init_cpdag(g)
    comp_of = {v: comp for comp in cpdag.chain_components() for v in comp}
    if mode == "ordered":
        return [tuple(sorted(cpdag.parents(v) | {u for u in comp_of[v] if u < v})) for v in range(g.n)]
    if mode == "component":
        return [tuple(sorted(cpdag.parents(v) | (set(comp_of[v]) - {v}))) for v in range(g.n)]
    raise ValueError(f"unknown regression mode {mode!r}")


class Likelihood(Protocol):
    n_samples: int

    def loglik(self, g: UndirectedGraph) -> float: ...


class GaussianLikelihood:
    """Maximized Gaussian log-likelihood with per-node and per-graph caches.

    Only the Gram matrix of the centered data is kept, so evaluating a graph
    costs nothing in ``N`` after construction.
    """

    def __init__(self, data: DataMatrix | np.ndarray, regression: RegressionMode = "component"):
        if not isinstance(data, DataMatrix):
            data = DataMatrix(np.asarray(data))
        regressor_sets(UndirectedGraph.empty(1), regression)  # validates the mode
        self.data = data
        self.regression = regression
        self.n_samples = data.N
        self.gram = data.values.T @ data.values
        self._node_cache: dict[tuple[int, tuple[int, ...]], float] = {}
        self._graph_cache: dict[int, float] = {}

    def node_variance(self, v: int, regressors: Sequence[int]) -> float:
        """ML residual variance of column ``v`` regressed on ``regressors`` (no intercept)."""
        s = self.gram
        total = s[v, v]
        if regressors:
            r = list(regressors)
            srr = s[np.ix_(r, r)]
            srv = s[r, v]
            if np.linalg.matrix_rank(srr) < len(r):
                srr = srr + RIDGE_SCALE * np.trace(srr) / len(r) * np.eye(len(r))
            beta = np.linalg.solve(srr, srv)
            total = total - srv @ beta
        return max(float(total) / self.n_samples, VARIANCE_FLOOR)

    def node_loglik(self, v: int, regressors: Sequence[int]) -> float:
        key = (v, tuple(regressors))
        hit = self._node_cache.get(key)
        if hit is None:
            var = self.node_variance(v, regressors)
            hit = -0.5 * self.n_samples * (math.log(2 * math.pi * var) + 1)
            self._node_cache[key] = hit
        return hit

    def loglik(self, g: UndirectedGraph) -> float:
        key = g.mask
        hit = self._graph_cache.get(key)
        if hit is None:
            hit = sum(self.node_loglik(v, r) for v, r in enumerate(regressor_sets(g, self.regression)))
            self._graph_cache[key] = hit
        return hit


@dataclass
class ConstantLikelihood:
    """Flat likelihood; the chain then targets the prior alone."""

    n_samples: int = 1

    def loglik(self, g: UndirectedGraph) -> float:
        return 0.0


def gaussian_log_likelihood(
    g: UndirectedGraph, data: DataMatrix | np.ndarray, regression: RegressionMode = "component"
) -> float:
    return GaussianLikelihood(data, regression).loglik(g)


def nuclear_penalty(g: UndirectedGraph) -> float:
    """Sum of absolute eigenvalues of the (symmetric) adjacency matrix."""
    if not g.edges:
        return 0.0
    eig = np.linalg.eigvalsh(np.array(g.adjacency(), dtype=float))
    return float(np.abs(eig).sum())


def bic_parameter_count(g: UndirectedGraph) -> int:
    return len(init_cpdag(g).skeleton().edges) + g.n


def penalized_score(
    g: UndirectedGraph, loglik: float, n_samples: int, kind: ScoreKind = "l0", lam: float = 1.0
) -> float:
    if kind == "l0":
        return loglik - 0.5 * bic_parameter_count(g) * math.log(n_samples)
    if kind == "nuclear":
        return loglik - lam * nuclear_penalty(g)
    raise ValueError(f"unknown score kind {kind!r}")


def resolve_lambda(lam: float | str, n_samples: int) -> float:
    """Numeric nuclear-norm weight; the rule ``half-log-n`` gives ``log(N) / 2``."""
    if isinstance(lam, str):
        if lam == "half-log-n":
            return 0.5 * math.log(n_samples)
        lam = float(lam)
    if not lam >= 0:
        raise ValueError("lambda must be nonnegative")
    return float(lam)


def score(
    g: UndirectedGraph,
    data: DataMatrix | np.ndarray,
    kind: ScoreKind = "l0",
    lam: float = 1.0,
    regression: RegressionMode = "component",
) -> float:
    lik = GaussianLikelihood(data, regression)
    return penalized_score(g, lik.loglik(g), lik.n_samples, kind, lam)


# ---------------------------------------------------------------------------
# Chain


@dataclass(frozen=True)
class ChainRecord:
    step: int
    uec_id: str
    log_likelihood: float
    log_prior: float
    score: float
    accepted: bool


@dataclass(frozen=True)
class ChainState:
    reduction: DagReduction
    log_likelihood: float
    log_prior: float
    scores: Mapping[str, float]

    @property
    def graph(self) -> UndirectedGraph:
        return UndirectedGraph.from_mask(self.reduction.n, self.reduction.edge_mask)


SCORE_KINDS: tuple[ScoreKind, ...] = ("l0", "nuclear")


def evaluate_state(d: DagReduction, likelihood: Likelihood, prior: Prior, lam: float = 1.0) -> ChainState:
    g = UndirectedGraph.from_mask(d.n, d.edge_mask)
    ll = likelihood.loglik(g)
    lp = prior.log_prior(d.n, len(d.sources))
    scores = {k: penalized_score(g, ll, likelihood.n_samples, k, lam) for k in SCORE_KINDS}
    return ChainState(d, ll, lp, scores)


def log_acceptance(current: ChainState, proposed: ChainState, proposal: MoveProposal) -> float:
    """Log of the MH ratio; ``-inf`` when the reverse move is impossible."""
    if proposal.reverse_prob <= 0.0:
        return -math.inf
    return (
        proposed.log_likelihood
        + proposed.log_prior
        + math.log(proposal.reverse_prob)
        - current.log_likelihood
        - current.log_prior
        - math.log(proposal.forward_prob)
    )


def mh_step(current: ChainState, proposal: MoveProposal, proposed: ChainState, rng: np.random.Generator) -> bool:
    """Accept with probability ``min(1, h)``, evaluated in log space."""
    log_h = log_acceptance(current, proposed, proposal)
    if log_h >= 0.0:
        return True
    return bool(math.log(rng.random()) < log_h)


@dataclass
class GruesResult:
    """Chain output. ``best`` maps every score kind to its optimal graph and score."""

    score_optimal: UndirectedGraph
    best_score: float
    chain: list[ChainRecord]
    best: dict[str, tuple[UndirectedGraph, float]]
    acceptance_rate: float = 0.0


def grues(
    data: DataMatrix | np.ndarray | None,
    init: UndirectedGraph,
    length: int,
    transitions: Mapping[str, float] | Sequence[float] | None = None,
    prior: Prior | None = None,
    score_kind: ScoreKind = "l0",
    rng: np.random.Generator | None = None,
    lam: float | str = 1.0,
    likelihood: Likelihood | None = None,
    regression: RegressionMode = "component",
) -> GruesResult:
    """Run one chain of ``length`` steps from ``init``.

    Each step proposes a move, scores the proposal (updating the best score
    seen), then accepts or rejects it. One record is appended per step with
    the state the chain occupies afterwards. The ``score`` column of the
    records uses ``score_kind``.
    """
    if length < 1:
        raise ValueError("length must be at least 1")
    if score_kind not in SCORE_KINDS:
        raise ValueError(f"unknown score kind {score_kind!r}")
    if not is_uec_representative(init):
        raise NotUECError(init)
    rng = np.random.default_rng() if rng is None else rng
    prior = prior or Prior()
    probs = normalize_transitions(transitions)
    if likelihood is None:
        if data is None:
            raise ValueError("need data or an explicit likelihood")
        likelihood = GaussianLikelihood(data, regression)
    lam = resolve_lambda(lam, likelihood.n_samples)
    n = init.n

    # reductions are canonical, so one cached state per graph suffices
    cache: dict[int, ChainState] = {}

    def evaluate(d: DagReduction) -> ChainState:
        hit = cache.get(d.edge_mask)
        if hit is None:
            hit = cache[d.edge_mask] = evaluate_state(d, likelihood, prior, lam)
        return hit

    current = evaluate(to_dag_reduction(init))
    best = {k: (current.reduction.edge_mask, current.scores[k]) for k in SCORE_KINDS}
    chain: list[ChainRecord] = []
    accepted_count = 0
    movable = any(probs[k] > 0 for k in available_kinds(current.reduction))
    for step in range(length):
        accepted = False
        if movable:
            proposal, new_reduction = propose_random_move(current.reduction, probs, rng)
            proposed = evaluate(new_reduction)
            for k in SCORE_KINDS:
                if proposed.scores[k] > best[k][1]:
                    best[k] = (new_reduction.edge_mask, proposed.scores[k])
            accepted = mh_step(current, proposal, proposed, rng)
            if accepted:
                current = proposed
                accepted_count += 1
        chain.append(
            ChainRecord(
                step,
                mask_to_id(n, current.reduction.edge_mask),
                current.log_likelihood,
                current.log_prior,
                current.scores[score_kind],
                accepted,
            )
        )
    best_graphs = {k: (UndirectedGraph.from_mask(n, m), sc) for k, (m, sc) in best.items()}
    return GruesResult(
        score_optimal=best_graphs[score_kind][0],
        best_score=best_graphs[score_kind][1],
        chain=chain,
        best=best_graphs,
        acceptance_rate=accepted_count / length,
    )


# ---------------------------------------------------------------------------
# Posterior summaries


@dataclass(frozen=True)
class Posterior:
    counts: dict[str, int]
    total: int

    def __post_init__(self) -> None:
        if sum(self.counts.values()) != self.total:
            raise ValueError("counts must sum to total")

    @classmethod
    def from_chain(cls, chain: Sequence[ChainRecord], burn_in: int = 0) -> "Posterior":
        kept = chain[burn_in:]
        counts: dict[str, int] = {}
        for rec in kept:
            counts[rec.uec_id] = counts.get(rec.uec_id, 0) + 1
        return cls(dict(sorted(counts.items())), len(kept))

    def probabilities(self) -> dict[str, float]:
        return {k: c / self.total for k, c in self.counts.items()}

    def ranked(self) -> list[tuple[str, int]]:
        """States by decreasing count, ties broken by lowest id."""
        return sorted(self.counts.items(), key=lambda kv: (-kv[1], int(kv[0], 16)))


def default_burn_in(length: int, init_mode: str) -> int:
    return 0 if init_mode == "it" else length // 2


def map_estimate(post: Posterior) -> str:
    if post.total <= 0:
        raise ValueError("empty posterior")
    return post.ranked()[0][0]


def hpd_set(post: Posterior, t: float) -> set[str]:
    """Greedy descending-probability prefix with cumulative mass at most ``t``."""
    if post.total <= 0:
        raise ValueError("empty posterior")
    if not 0 < t <= 1:
        raise ValueError("t must lie in (0, 1]")
    out: set[str] = set()
    mass = 0
    # slack absorbs float drift when t * total is an integer
    for ident, count in post.ranked():
        if (mass + count) > t * post.total + 1e-9:
            break
        mass += count
        out.add(ident)
    return out


def shs(a: UndirectedGraph, b: UndirectedGraph) -> float:
    """Structural Hamming similarity: share of vertex pairs on which the graphs agree."""
    if a.n != b.n:
        raise ValueError("graphs must have the same vertex count")
    pairs = a.n * (a.n - 1) // 2
    if pairs == 0:
        return 1.0
    return 1.0 - len(a.edges ^ b.edges) / pairs


def exact_prior_target(n: int, prior: Prior, graphs: Iterable[UndirectedGraph]) -> dict[str, float]:
    """Normalized prior over ``graphs``; the stationary law under a flat likelihood."""
    weights = {}
    for g in graphs:
        k = len(min_edge_clique_cover(g))
        weights[mask_to_id(n, g.mask)] = math.exp(prior.log_prior(n, k))
    total = sum(weights.values())
    return {k: w / total for k, w in weights.items()}


def total_variation(p: Mapping[str, float], q: Mapping[str, float]) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)


def graph_of(n: int, ident: str) -> UndirectedGraph:
    return id_to_graph(n, ident)
