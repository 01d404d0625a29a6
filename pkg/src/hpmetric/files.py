"""CSV and sidecar I/O for the command line tools.

Dense matrices are written with a label header row and 17-significant-digit
values so that write-then-read round-trips exactly.  Every CLI output file
gets a JSON sidecar (same basename, .meta.json) recording version, seed,
parameters, and timing.
"""

from __future__ import annotations

import json
import time
from pathlib import Path

import numpy as np

from .errors import ParseError
from .graphs import WeightedDigraph

FLOAT_FMT = "{:.17g}"


def _fmt(x: float) -> str:
    return FLOAT_FMT.format(float(x))


def write_dense_csv(path, M: np.ndarray, labels) -> None:
    M = np.asarray(M)
    lines = [",".join(str(l) for l in labels)]
    for row in M:
        lines.append(",".join(_fmt(x) for x in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_dense_csv(path):
    text = Path(path).read_text(encoding="utf-8")
    lines = [l for l in text.splitlines() if l.strip() and not l.startswith("#")]
    if not lines:
        raise ParseError("empty matrix file", 1)
    labels = lines[0].split(",")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        vals = line.split(",")
        if len(vals) != len(labels):
            raise ParseError(f"expected {len(labels)} values", lineno)
        rows.append([float(v) for v in vals])
    return np.array(rows), labels


def write_edge_csv(path, g: WeightedDigraph) -> None:
    coo = g.weights.tocoo()
    lines = []
    for i, j, w in zip(coo.row, coo.col, coo.data):
        lines.append(f"{g.labels[i]},{g.labels[j]},{_fmt(w)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_column_csv(path, labels, columns: dict) -> None:
    """Write `label,<col1>,<col2>,...` rows with a header line."""
    names = list(columns)
    lines = ["label," + ",".join(names)]
    for i, lab in enumerate(labels):
        vals = []
        for name in names:
            v = columns[name][i]
            vals.append(_fmt(v) if isinstance(v, (int, float, np.floating)) else str(v))
        lines.append(f"{lab}," + ",".join(vals))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def meta_path(path) -> Path:
    p = Path(path)
    return p.with_name(p.stem + ".meta.json")


def write_meta(path, command: str, params: dict, seed=None, started: float = None) -> None:
    from . import __version__

    meta = {
        "version": __version__,
        "command": command,
        "parameters": params,
        "seed": seed,
    }
    if started is not None:
        meta["elapsed_seconds"] = time.time() - started
    meta_path(path).write_text(json.dumps(meta, indent=2, default=str) + "\n",
                               encoding="utf-8")
