"""Command-line driver: ``grues {enumerate,check,simulate,fit,report}``.

Failures exit with status 2 and print one line to stderr of the form
``error<TAB><kind><TAB><message>``.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .baseline import TestConfig, largest_uec_subgraph, marginal_independence_graph
from .graph import Dag, GraphError, UndirectedGraph, graph_from_json, udg
from .inference import (
    DataMatrix,
    Posterior,
    Prior,
    default_burn_in,
    grues,
    hpd_set,
    map_estimate,
    resolve_lambda,
    shs,
)
from .io import (
    posterior_payload,
    read_chain_csv,
    read_data_csv,
    read_header,
    read_json,
    write_chain_csv,
    write_data_csv,
    write_histogram_csv,
    write_json,
    write_text,
)
from .monomial import MOVE_KINDS
from .reduction import to_dag_reduction
from .synth import LinearGaussianModel, random_dag, random_weights, sample
from .uec import (
    enumerate_uec_representatives,
    id_to_graph,
    is_uec_representative,
    maximum_independent_set,
    min_edge_clique_cover,
    minimum_clique_cover,
    monomial_rep,
    uec_id,
)

INIT_MODES = ("empty", "it", "random", "file")


@dataclass
class RunConfig:
    """Everything that determines a fit; serialized into every output header."""

    seed: int = 0
    length: int = 10_000
    prior: str = "uniform"
    score: str = "bic"
    lam: float | str = 1.0
    alpha: float = 0.05
    init: str = "empty"
    init_file: str | None = None
    burn_in: int | None = None
    transitions: str = "1:1:1:1:2"
    out_dir: str = "."
    truth: str | None = None
    regression: str = "component"

    def __post_init__(self) -> None:
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.length < 1:
            raise ValueError("length must be at least 1")
        if self.score not in ("bic", "nuclear"):
            raise ValueError("score must be 'bic' or 'nuclear'")
        if self.init not in INIT_MODES:
            raise ValueError(f"init must be one of {INIT_MODES}")
        if self.init == "file" and not self.init_file:
            raise ValueError("init 'file' needs --init-file")
        if self.burn_in is not None and not 0 <= self.burn_in < self.length:
            raise ValueError("burn-in must lie in [0, length)")
        if self.regression not in ("ordered", "component"):
            raise ValueError("regression must be 'ordered' or 'component'")
        if isinstance(self.lam, str) and self.lam != "half-log-n":
            self.lam = float(self.lam)
        resolve_lambda(self.lam, 2)
        Prior.parse(self.prior)
        TestConfig(self.alpha)
        self.transition_weights()

    def transition_weights(self) -> dict[str, float]:
        parts = self.transitions.split(":")
        if len(parts) != 5:
            raise ValueError("transitions must look like m:s:a:d:w")
        values = [float(p) for p in parts]
        if any(v < 0 for v in values) or sum(values) <= 0:
            raise ValueError("transition weights must be nonnegative and not all zero")
        return dict(zip(MOVE_KINDS, values))

    @property
    def score_kind(self) -> str:
        return "l0" if self.score == "bic" else "nuclear"

    def effective_burn_in(self) -> int:
        return default_burn_in(self.length, self.init) if self.burn_in is None else self.burn_in


# ---------------------------------------------------------------------------
# Library-level pipeline (also used by scripts and the acceptance suite)


def initial_graph(cfg: RunConfig, x: np.ndarray, rng: np.random.Generator) -> UndirectedGraph:
    n = x.shape[1]
    if cfg.init == "empty":
        return UndirectedGraph.empty(n)
    if cfg.init == "it":
        return largest_uec_subgraph(marginal_independence_graph(x, TestConfig(cfg.alpha)))
    if cfg.init == "random":
        return udg(random_dag(n, 0.5, rng))
    assert cfg.init_file is not None
    g = graph_from_json(read_json(cfg.init_file))
    if not isinstance(g, UndirectedGraph) or g.n != n:
        raise GraphError(f"init file must hold an undirected graph on {n} vertices")
    return g


def _edges(g: UndirectedGraph) -> list[list[int]]:
    return [list(e) for e in sorted(g.edges)]


def fit_data(x: np.ndarray, cfg: RunConfig) -> dict:
    """Run one chain and build the summary. Returns ``summary``, ``chain``, ``posterior``."""
    data = DataMatrix(x)
    n = data.n
    rng = np.random.default_rng(cfg.seed)
    u_it = marginal_independence_graph(data.values, TestConfig(cfg.alpha))
    init = initial_graph(cfg, data.values, rng)
    result = grues(
        data,
        init,
        cfg.length,
        transitions=cfg.transition_weights(),
        prior=Prior.parse(cfg.prior),
        score_kind=cfg.score_kind,  # type: ignore[arg-type]
        rng=rng,
        lam=cfg.lam,
        regression=cfg.regression,  # type: ignore[arg-type]
    )
    post = Posterior.from_chain(result.chain, cfg.effective_burn_in())
    map_id = map_estimate(post)
    estimates = {
        "map": id_to_graph(n, map_id),
        "it": u_it,
        "l0": result.best["l0"][0],
        "nuclear": result.best["nuclear"][0],
    }
    hpd = {t: sorted(hpd_set(post, t)) for t in (0.1, 0.2)}
    summary: dict = {
        "n": n,
        "N": data.N,
        "init": {"uec_id": uec_id(init), "edges": _edges(init)},
        "acceptance_rate": result.acceptance_rate,
        "map": {"uec_id": map_id, "edges": _edges(estimates["map"]), "probability": post.counts[map_id] / post.total},
        "hpd_0.1": hpd[0.1],
        "hpd_0.2": hpd[0.2],
        "it": {"edges": _edges(u_it), "is_uec": is_uec_representative(u_it)},
        "l0": {"uec_id": uec_id(estimates["l0"]), "edges": _edges(estimates["l0"]), "score": result.best["l0"][1]},
        "nuclear": {
            "uec_id": uec_id(estimates["nuclear"]),
            "edges": _edges(estimates["nuclear"]),
            "score": result.best["nuclear"][1],
        },
    }
    if cfg.truth:
        model = LinearGaussianModel.from_json(read_json(cfg.truth))
        truth = udg(model.dag)
        summary["truth"] = {"uec_id": uec_id(truth), "edges": _edges(truth)}
        summary["shs"] = {k: shs(g, truth) for k, g in estimates.items()}
        summary["correct"] = {k: g == truth for k, g in estimates.items()}
        summary["truth_in_hpd"] = {str(t): uec_id(truth) in ids for t, ids in hpd.items()}
    else:
        summary["shs_vs_map"] = {k: shs(g, estimates["map"]) for k, g in estimates.items()}
    return {"summary": summary, "chain": result.chain, "posterior": post}


def _fit_one(args: tuple[str, dict, str]) -> str:
    data_path, cfg_dict, out_dir = args
    cfg = RunConfig(**cfg_dict)
    x = read_data_csv(data_path)
    out = fit_data(x, cfg)
    header = dict(cfg_dict, data=data_path)
    out_path = Path(out_dir)
    out_path.mkdir(parents=True, exist_ok=True)
    write_chain_csv(out_path / "chain.csv", out["chain"], header)
    write_json(out_path / "posterior.json", header, posterior_payload(out["posterior"], x.shape[1]))
    write_json(out_path / "summary.json", header, out["summary"])
    return str(out_path)


# ---------------------------------------------------------------------------
# Subcommands


def cmd_enumerate(args: argparse.Namespace) -> int:
    graphs = enumerate_uec_representatives(args.n, limit=args.limit)
    body = "".join(json.dumps(dict(g.to_json(), uec_id=uec_id(g))) + "\n" for g in graphs)
    config = {"command": "enumerate", "n": args.n}
    if args.out:
        write_text(args.out, config, body)
    else:
        sys.stdout.write(body)
    print(f"count {len(graphs)}", file=sys.stderr if not args.out else sys.stdout)
    return 0


def check_report(g: UndirectedGraph) -> dict:
    indep = maximum_independent_set(g)
    report: dict = {
        "n": g.n,
        "uec_id": uec_id(g),
        "is_uec_representative": is_uec_representative(g),
        "alpha": len(indep),
        "independent_set": indep,
    }
    if report["is_uec_representative"]:
        cover = min_edge_clique_cover(g)
        report["delta"] = len(cover)
        report["cover"] = cover.as_sorted_lists()
        report["centers"] = list(cover.centers)
        report["monomial"] = [[i, sorted(a)] for i, a in monomial_rep(g).terms]
        report["reduction"] = to_dag_reduction(g).to_json()
    else:
        witness = minimum_clique_cover(g)
        report["delta"] = len(witness)
        report["cover"] = sorted(sorted(c) for c in witness)
    return report


def cmd_check(args: argparse.Namespace) -> int:
    g = graph_from_json(read_json(args.graph))
    if isinstance(g, Dag):
        g = udg(g)
    if not isinstance(g, UndirectedGraph):
        raise GraphError("check expects an undirected graph or a DAG")
    print(json.dumps(check_report(g), indent=2))
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    config = {"command": "simulate", "n": args.n, "p": args.p, "N": args.N, "seed": args.seed}
    rng = np.random.default_rng(args.seed)
    dag = random_dag(args.n, args.p, rng)
    model = random_weights(dag, rng, seed=args.seed)
    x = sample(model, args.N, rng)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_data_csv(out / "data.csv", x, config)
    write_json(out / "model.json", config, model.to_json())
    print(json.dumps({"data": str(out / "data.csv"), "model": str(out / "model.json"), "uec_id": uec_id(udg(dag))}))
    return 0


def cmd_fit(args: argparse.Namespace) -> int:
    cfg = RunConfig(
        seed=args.seed,
        length=args.length,
        prior=args.prior,
        score=args.score,
        lam=args.lam,
        alpha=args.alpha,
        init=args.init,
        init_file=args.init_file,
        burn_in=args.burn_in,
        transitions=args.transitions,
        out_dir=args.out_dir,
        truth=args.truth,
        regression=args.regression,
    )
    jobs = []
    for k, path in enumerate(args.data):
        cfg_k = asdict(cfg)
        cfg_k["seed"] = (cfg.seed + k) % 2**64
        out_dir = cfg.out_dir if len(args.data) == 1 else str(Path(cfg.out_dir) / Path(path).stem)
        jobs.append((path, cfg_k, out_dir))
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            outs = list(pool.map(_fit_one, jobs))
    else:
        outs = [_fit_one(j) for j in jobs]
    for out in outs:
        print(json.dumps(read_json(Path(out) / "summary.json"), indent=2))
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    chain = read_chain_csv(args.chain)
    if not chain:
        raise ValueError("chain is empty")
    header = read_header(args.chain)
    if args.burn_in is not None:
        burn_in = args.burn_in
    elif "length" in header:
        burn_in = RunConfig(**{k: v for k, v in header.items() if k in RunConfig.__dataclass_fields__}).effective_burn_in()
    else:
        burn_in = 0
    post = Posterior.from_chain(chain, burn_in)
    if post.total == 0:
        raise ValueError("no chain records left after burn-in")
    config = {"command": "report", "chain": args.chain, "burn_in": burn_in}
    if args.out:
        write_histogram_csv(args.out, post, config)
    else:
        for ident, count in post.ranked():
            print(f"{ident},{count / post.total!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="grues", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"artifact {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="list every UEC-representative on n vertices (JSONL)")
    p.add_argument("n", type=int)
    p.add_argument("--limit", type=int, default=6)
    p.add_argument("--out")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("check", help="recognition report for a graph JSON file")
    p.add_argument("graph")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("simulate", help="sample a random linear Gaussian DAG model")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--N", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="run the MCMC search on one or more data CSVs")
    p.add_argument("data", nargs="+")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--length", type=int, default=10_000)
    p.add_argument("--prior", default="uniform", help="uniform or delta:S:P")
    p.add_argument("--score", choices=("bic", "nuclear"), default="bic")
    p.add_argument("--lambda", dest="lam", default="1.0", help="nuclear-norm weight, a number or 'half-log-n'")
    p.add_argument("--regression", choices=("ordered", "component"), default="component")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--init", choices=INIT_MODES, default="empty")
    p.add_argument("--init-file")
    p.add_argument("--burn-in", type=int)
    p.add_argument("--transitions", default="1:1:1:1:2", help="merge:split:out_add:out_del:within weights")
    p.add_argument("--truth", help="model JSON from 'simulate'; adds SHS and recovery to the summary")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("report", help="posterior histogram from a chain CSV")
    p.add_argument("chain")
    p.add_argument("--burn-in", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return int(args.func(args))
    except (ValueError, GraphError, OSError, KeyError, TypeError) as exc:
        message = str(exc).replace("\n", " ")
        print(f"error\t{type(exc).__name__}\t{message}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
