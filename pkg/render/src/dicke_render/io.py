"""CSV/JSON loading with schema validation and manifest consistency checks."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np


class SchemaError(ValueError):
    """Input file does not match the expected column schema."""


def load_csv(path: str | Path, required: list[str]) -> dict[str, np.ndarray]:
    """Read a CSV into named float columns, enforcing the required header.

    ``required`` lists the columns that must be present (extras are kept).
    A missing file is an OSError; an empty file or one missing a required
    column is a SchemaError naming the problem.
    """
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: file is empty") from None
        for col in required:
            if col not in header:
                raise SchemaError(f"{path}: missing required column '{col}'")
        rows = [row for row in reader if row]
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    data = np.array(rows, dtype=object)
    out = {}
    for i, name in enumerate(header):
        col = data[:, i]
        try:
            out[name] = np.array([float(v) for v in col])
        except ValueError as exc:
            raise SchemaError(f"{path}: non-numeric value in column '{name}': {exc}")
    return out


def load_json(path: str | Path, required: list[str]) -> dict:
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON: {exc}") from None
    for key in required:
        if key not in obj:
            raise SchemaError(f"{path}: missing required key '{key}'")
    return obj


def check_manifest_consistency(paths: list[str | Path]) -> None:
    """Refuse overlays whose run manifests disagree on model parameters.

    Each input file may sit in a run directory containing a manifest.json
    (written by the producing CLI).  When two or more manifests are found,
    their ``params`` blocks must be identical.
    """
    params_seen: list[tuple[Path, dict]] = []
    for p in paths:
        manifest = Path(p).parent / "manifest.json"
        if not manifest.exists():
            continue
        try:
            obj = json.loads(manifest.read_text())
        except json.JSONDecodeError:
            raise SchemaError(f"{manifest}: invalid JSON")
        if "params" in obj:
            params_seen.append((manifest, obj["params"]))
    for path, params in params_seen[1:]:
        if params != params_seen[0][1]:
            raise SchemaError(
                f"inconsistent manifests: {params_seen[0][0]} and {path} "
                "disagree on model parameters"
            )
