"""Replicate experiments on synthetic data, shared by ``scripts/`` and the acceptance suite."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .baseline import TestConfig, marginal_independence_graph
from .cli import RunConfig, fit_data
from .graph import UndirectedGraph, udg
from .inference import shs
from .synth import random_dag, random_weights, sample, single_edge_model
from .uec import id_to_graph, uec_id

ESTIMATORS = ("map", "it", "l0", "nuclear")


@dataclass
class RecoveryConfig:
    n: int = 5
    p: float = 0.5
    datasets: int = 20
    n_samples: int = 1000
    length: int = 10_000
    seed: int = 0
    prior_peak: int | None = None
    init: str = "it"
    lam: float | str = "half-log-n"
    regression: str = "component"
    jobs: int = 1


@dataclass
class RecoveryResult:
    config: RecoveryConfig
    correct: dict[str, float] = field(default_factory=dict)
    mean_shs: dict[str, float] = field(default_factory=dict)
    hpd_hit: dict[str, float] = field(default_factory=dict)
    per_dataset: list[dict] = field(default_factory=list)


def _one_dataset(args: tuple[dict, int]) -> dict:
    cfg = RecoveryConfig(**args[0])
    k = args[1]
    rng = np.random.default_rng([cfg.seed, k])
    dag = random_dag(cfg.n, cfg.p, rng)
    model = random_weights(dag, rng)
    x = sample(model, cfg.n_samples, rng)
    truth = udg(dag)
    # peak the prior at the true source count unless told otherwise
    peak = cfg.prior_peak if cfg.prior_peak is not None else len(dag.sources())
    run = RunConfig(
        seed=int(rng.integers(2**63)),
        length=cfg.length,
        prior=f"delta:{peak}:{cfg.n}",
        init=cfg.init,
        lam=cfg.lam,
        regression=cfg.regression,
    )
    out = fit_data(x, run)
    s = out["summary"]
    graphs: dict[str, UndirectedGraph] = {
        "map": id_to_graph(cfg.n, s["map"]["uec_id"]),
        "it": marginal_independence_graph(x, TestConfig(run.alpha)),
        "l0": id_to_graph(cfg.n, s["l0"]["uec_id"]),
        "nuclear": id_to_graph(cfg.n, s["nuclear"]["uec_id"]),
    }
    truth_id = format(truth.mask, "x")
    return {
        "dataset": k,
        "truth_edges": sorted(truth.edges),
        "correct": {e: graphs[e] == truth for e in ESTIMATORS},
        "shs": {e: shs(graphs[e], truth) for e in ESTIMATORS},
        "hpd": {
            t: any(int(i, 16) == int(truth_id, 16) for i in s[f"hpd_{t}"]) for t in ("0.1", "0.2")
        },
        "acceptance_rate": s["acceptance_rate"],
    }


def recovery_experiment(cfg: RecoveryConfig) -> RecoveryResult:
    """Simulate ``cfg.datasets`` models at density ``cfg.p`` and score every estimator."""
    tasks = [(asdict(cfg), k) for k in range(cfg.datasets)]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            rows = list(pool.map(_one_dataset, tasks))
    else:
        rows = [_one_dataset(t) for t in tasks]
    res = RecoveryResult(cfg, per_dataset=rows)
    for e in ESTIMATORS:
        res.correct[e] = float(np.mean([r["correct"][e] for r in rows]))
        res.mean_shs[e] = float(np.mean([r["shs"][e] for r in rows]))
    for t in ("0.1", "0.2"):
        res.hpd_hit[t] = float(np.mean([r["hpd"][t] for r in rows]))
    return res


@dataclass
class SingleEdgeConfig:
    """Three-variable model with one edge, as in the posterior-visualization run."""

    n_samples: int = 1000
    length: int = 2000
    burn_in: int = 1000
    prior: str = "delta:2:3"
    regression: str = "component"


def single_edge_replicate(seed: int, cfg: SingleEdgeConfig | None = None) -> dict:
    """Fresh data and chain for one seed; reports the MAP id and the ranked posterior."""
    cfg = cfg or SingleEdgeConfig()
    rng = np.random.default_rng(seed)
    model = single_edge_model()
    x = sample(model, cfg.n_samples, rng)
    run = RunConfig(
        seed=int(rng.integers(2**63)),
        length=cfg.length,
        burn_in=cfg.burn_in,
        prior=cfg.prior,
        regression=cfg.regression,
    )
    out = fit_data(x, run)
    post = out["posterior"]
    truth = uec_id(udg(model.dag))
    map_id = out["summary"]["map"]["uec_id"]
    return {
        "seed": seed,
        "truth": truth,
        "map": map_id,
        "correct": map_id == truth,
        "map_probability": post.counts[map_id] / post.total,
        "ranked": [(i, c / post.total) for i, c in post.ranked()],
    }
