"""Total variation between a constant-likelihood chain and its exact prior target.

Usage: python3 scripts/stationarity.py [--n 3] [--steps 100000] [--seeds 3]
"""

import argparse

import numpy as np

from grues.graph import UndirectedGraph
from grues.inference import ConstantLikelihood, Posterior, Prior, exact_prior_target, grues, total_variation
from grues.uec import enumerate_uec_representatives


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--steps", type=int, default=100_000)
    ap.add_argument("--seeds", type=int, default=3)
    args = ap.parse_args()

    reps = enumerate_uec_representatives(args.n)
    priors = {"uniform": Prior(), f"delta:2:{args.n}": Prior("delta", 2, args.n)}
    for name, prior in priors.items():
        target = exact_prior_target(args.n, prior, reps)
        for seed in range(args.seeds):
            out = grues(
                None,
                UndirectedGraph.empty(args.n),
                args.steps,
                prior=prior,
                likelihood=ConstantLikelihood(),
                rng=np.random.default_rng(seed),
            )
            post = Posterior.from_chain(out.chain)
            tv = total_variation(post.probabilities(), target)
            print(f"{name:>10}  seed {seed}  tv {tv:.4f}  acceptance {out.acceptance_rate:.3f}")


if __name__ == "__main__":
    main()
