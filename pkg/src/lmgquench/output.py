"""Flat-file writers shared by the command-line front end."""
from __future__ import annotations

import json
import math
import os
from typing import Iterable, Sequence

import numpy as np

from . import __version__


def fmt_number(v) -> str:
    """17 significant digits, independent of locale; integers stay integers."""
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    return "" if math.isnan(v) else f"{v:.17g}"


def _plain(v):
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    if isinstance(v, np.ndarray):
        return [_plain(x) for x in v.tolist()]
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return v


def write_json(path: str, obj) -> str:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_plain(obj), fh, indent=2, sort_keys=False)
        fh.write("\n")
    return path


def write_table(
    out_dir: str, stem: str, columns: Sequence[str], rows: Iterable[Sequence], fmt: str = "csv"
) -> str:
    """Write ``rows`` as ``stem.csv`` (header + 17-digit numbers) or ``stem.json`` (list of records)."""
    if fmt == "csv":
        path = os.path.join(out_dir, f"{stem}.csv")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(columns) + "\n")
            for row in rows:
                fh.write(",".join(fmt_number(v) for v in row) + "\n")
        return path
    if fmt == "json":
        path = os.path.join(out_dir, f"{stem}.json")
        return write_json(path, [dict(zip(columns, row)) for row in rows])
    raise ValueError(f"unknown format {fmt!r}")


def write_manifest(out_dir: str, command: str, config: dict) -> str:
    manifest = {"artifact": "lmgquench", "version": __version__, "command": command, "config": config}
    return write_json(os.path.join(out_dir, "manifest.json"), manifest)
