"""Random linear Gaussian DAG models.

Rows follow ``X = X W + eps`` with unit-variance normal noise, so a sample is
``eps (I - W)^{-1}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import Dag

WEIGHT_FLOOR = 1e-3


@dataclass(frozen=True)
class LinearGaussianModel:
    dag: Dag
    weights: dict[tuple[int, int], float] = field(default_factory=dict)
    seed: int | None = None

    def __post_init__(self) -> None:
        if set(self.weights) != set(self.dag.edges):
            raise ValueError("weights must be given for exactly the DAG edges")
        if any(w == 0 for w in self.weights.values()):
            raise ValueError("edge weights must be nonzero")

    @property
    def n(self) -> int:
        return self.dag.n

    def weight_matrix(self) -> np.ndarray:
        w = np.zeros((self.n, self.n))
        for (a, b), value in self.weights.items():
            w[a, b] = value
        return w

    def covariance(self) -> np.ndarray:
        """Implied covariance ``(I - W)^{-T} (I - W)^{-1}``."""
        inv = np.linalg.inv(np.eye(self.n) - self.weight_matrix())
        return inv.T @ inv

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "directed": [list(e) for e in sorted(self.dag.edges)],
            "weights": [[a, b, self.weights[(a, b)]] for a, b in sorted(self.weights)],
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, data: dict) -> "LinearGaussianModel":
        dag = Dag.from_edges(data["n"], data["directed"])
        return cls(dag, {(int(a), int(b)): float(w) for a, b, w in data["weights"]}, data.get("seed"))


def random_dag(n: int, p: float, rng: np.random.Generator) -> Dag:
    """Each pair consistent with a uniformly random order becomes an edge with probability ``p``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("edge probability must lie in [0, 1]")
    order = rng.permutation(n)
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                edges.append((int(order[i]), int(order[j])))
    return Dag.from_edges(n, edges)


def random_weights(
    dag: Dag, rng: np.random.Generator, floor: float = WEIGHT_FLOOR, seed: int | None = None
) -> LinearGaussianModel:
    """Uniform weights on ``[-1, 1]``, redrawn while ``|w| < floor``."""
    weights = {}
    for edge in sorted(dag.edges):
        w = 0.0
        while abs(w) < floor:
            w = float(rng.uniform(-1.0, 1.0))
        weights[edge] = w
    return LinearGaussianModel(dag, weights, seed)


def sample(model: LinearGaussianModel, n_samples: int, rng: np.random.Generator) -> np.ndarray:
    if n_samples < 1:
        raise ValueError("need at least one sample")
    eps = rng.standard_normal((n_samples, model.n))
    return np.linalg.solve((np.eye(model.n) - model.weight_matrix()).T, eps.T).T


def single_edge_model() -> LinearGaussianModel:
    """Three variables, one edge ``0 -> 2`` with weight -0.9247; vertex 1 isolated."""
    return LinearGaussianModel(Dag.from_edges(3, [(0, 2)]), {(0, 2): -0.9247})
