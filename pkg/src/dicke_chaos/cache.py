"""Content-addressed disk cache for expensive intermediates.

Spectra (dense diagonalizations at d ~ 10^4) and Lyapunov fields (10^4 long
orbit integrations) dominate the pipeline cost and are reused across stages,
so both are cached keyed by a hash of every input that affects the values.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

import numpy as np

_ENV_VAR = "DICKE_CACHE_DIR"


def cache_dir() -> Path:
    root = os.environ.get(_ENV_VAR)
    if root:
        path = Path(root)
    else:
        path = Path.home() / ".cache" / "dicke_chaos"
    path.mkdir(parents=True, exist_ok=True)
    return path


def key_of(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:24]


def load_arrays(kind: str, payload: dict) -> dict | None:
    path = cache_dir() / f"{kind}-{key_of(payload)}.npz"
    if not path.exists():
        return None
    with np.load(path, allow_pickle=False) as data:
        return {name: data[name] for name in data.files}


def store_arrays(kind: str, payload: dict, arrays: dict) -> Path:
    path = cache_dir() / f"{kind}-{key_of(payload)}.npz"
    tmp = path.with_suffix(".tmp.npz")
    np.savez_compressed(tmp, **arrays)
    os.replace(tmp, path)
    return path
