"""Deterministic result files: JSON reports and CSV tables stamped with config hash and seed."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from pathlib import Path

import numpy as np

__all__ = ["config_hash", "to_jsonable", "write_json", "write_csv", "read_csv"]


def to_jsonable(obj):
    """Convert numpy containers and scalars into plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def config_hash(config: dict) -> str:
    """SHA-256 of the canonical JSON form of ``config`` (``output_dir`` excluded)."""
    body = {k: v for k, v in config.items() if k != "output_dir"}
    text = json.dumps(to_jsonable(body), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def write_json(path, payload: dict, meta: dict) -> Path:
    path = Path(path)
    doc = {"meta": meta, **to_jsonable(payload)}
    path.write_text(json.dumps(to_jsonable(doc), sort_keys=True, indent=2) + "\n")
    return path


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return str(int(v))
    return v


def write_csv(path, header, rows, meta: dict) -> Path:
    """CSV with one leading ``#`` comment line carrying the metadata."""
    path = Path(path)
    buf = io.StringIO()
    buf.write("# " + " ".join(f"{k}={meta[k]}" for k in sorted(meta)) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    path.write_text(buf.getvalue())
    return path


def read_csv(path):
    """Return ``(meta, header, rows)``; values are left as strings."""
    lines = Path(path).read_text().splitlines()
    meta = dict(item.split("=", 1) for item in lines[0].lstrip("# ").split())
    reader = csv.reader(lines[1:])
    header = next(reader)
    return meta, header, list(reader)
