"""File formats. Text outputs start with ``#`` comment lines carrying provenance."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from . import __version__
from .inference import ChainRecord, Posterior

CHAIN_COLUMNS = ("step", "uec_id", "log_likelihood", "log_prior", "score", "accepted")


def header_lines(config: Mapping | None) -> list[str]:
    lines = [f"# artifact {__version__}"]
    if config is not None:
        lines.append("# config " + json.dumps(config, sort_keys=True))
    return lines


def read_header(path: str | Path) -> dict:
    """Parse the ``# config`` line of a text output, if any."""
    with open(path) as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            if line.startswith("# config "):
                return json.loads(line[len("# config "):])
    return {}


def _strip_comments(path: str | Path) -> list[str]:
    with open(path) as fh:
        return [line for line in fh if line.strip() and not line.startswith("#")]


def write_text(path: str | Path, config: Mapping | None, body: str) -> None:
    Path(path).write_text("\n".join(header_lines(config)) + "\n" + body)


def write_json(path: str | Path, config: Mapping | None, payload: Mapping) -> None:
    """JSON has no comments, so provenance goes in a leading ``_header`` field."""
    doc = {"_header": {"artifact": __version__, "config": config}}
    doc.update(payload)
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=False) + "\n")


def read_json(path: str | Path) -> dict:
    text = "".join(_strip_comments(path))
    return json.loads(text)


def write_data_csv(path: str | Path, x: np.ndarray, config: Mapping | None = None) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f"x{j}" for j in range(x.shape[1])])
    for row in x:
        writer.writerow([repr(float(v)) for v in row])
    write_text(path, config, buf.getvalue())


def read_data_csv(path: str | Path) -> np.ndarray:
    rows = list(csv.reader(_strip_comments(path)))
    if not rows:
        raise ValueError(f"{path}: no data")
    header, body = rows[0], rows[1:]
    expected = [f"x{j}" for j in range(len(header))]
    if [h.strip() for h in header] != expected:
        raise ValueError(f"{path}: header must be {','.join(expected)}")
    for k, row in enumerate(body):
        if len(row) != len(header):
            raise ValueError(f"{path}: row {k + 1} has {len(row)} fields, expected {len(header)}")
    return np.array([[float(v) for v in row] for row in body], dtype=float).reshape(len(body), len(header))


def write_chain_csv(path: str | Path, chain: Iterable[ChainRecord], config: Mapping | None = None) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CHAIN_COLUMNS)
    for r in chain:
        writer.writerow([r.step, r.uec_id, repr(r.log_likelihood), repr(r.log_prior), repr(r.score), int(r.accepted)])
    write_text(path, config, buf.getvalue())


def read_chain_csv(path: str | Path) -> list[ChainRecord]:
    rows = list(csv.reader(_strip_comments(path)))
    if not rows or tuple(rows[0]) != CHAIN_COLUMNS:
        raise ValueError(f"{path}: missing chain header {','.join(CHAIN_COLUMNS)}")
    return [
        ChainRecord(int(s), u, float(ll), float(lp), float(sc), bool(int(a)))
        for s, u, ll, lp, sc, a in rows[1:]
    ]


def posterior_payload(post: Posterior, n: int) -> dict:
    return {"n": n, "total": post.total, "counts": dict(post.counts)}


def write_histogram_csv(path: str | Path, post: Posterior, config: Mapping | None = None) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["uec_id", "probability"])
    for ident, count in post.ranked():
        writer.writerow([ident, repr(count / post.total)])
    write_text(path, config, buf.getvalue())
