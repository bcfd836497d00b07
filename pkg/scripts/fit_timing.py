"""Wall time of ``grues fit`` as chain length and sample size double (n = 5).

Usage: python3 scripts/fit_timing.py [--repeats 3]
"""

import argparse
import tempfile
import time
from contextlib import redirect_stdout
from io import StringIO
from pathlib import Path

import numpy as np

from grues.cli import main as cli_main
from grues.io import write_data_csv
from grues.reduction import clear_move_cache
from grues.synth import random_dag, random_weights, sample


def best_time(path: Path, length: int, out_dir: Path, repeats: int) -> float:
    best = float("inf")
    for k in range(repeats):
        clear_move_cache()
        start = time.perf_counter()
        with redirect_stdout(StringIO()):
            cli_main(["fit", str(path), "--length", str(length), "--seed", str(k), "--out-dir", str(out_dir)])
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--lengths", default="1000,2000,4000,8000")
    ap.add_argument("--samples", default="500,1000,2000,4000")
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    model = random_weights(random_dag(5, 0.5, rng), rng)
    with tempfile.TemporaryDirectory() as tmp:
        root = Path(tmp)
        data = {}
        for n_samples in (int(v) for v in args.samples.split(",")):
            data[n_samples] = root / f"n{n_samples}.csv"
            write_data_csv(data[n_samples], sample(model, n_samples, rng))
        base_n = sorted(data)[len(data) // 2 - 1]
        print(f"chain length (N = {base_n})")
        for length in (int(v) for v in args.lengths.split(",")):
            print(f"  {length:6d}  {best_time(data[base_n], length, root, args.repeats):6.2f}s")
        print("sample size (length = 2000)")
        for n_samples, path in data.items():
            print(f"  {n_samples:6d}  {best_time(path, 2000, root, args.repeats):6.2f}s")


if __name__ == "__main__":
    main()
