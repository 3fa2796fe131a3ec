"""Deterministic JSON output and the shipped JSON schemas."""

from __future__ import annotations

import json
import math
from importlib import resources

import numpy as np

SCHEMA_NAMES = (
    "simulate",
    "fit",
    "diagnose",
    "screen",
    "importance",
    "cv",
    "rate-experiment",
    "objective-comparison",
)


def to_jsonable(obj):
    """Recursively convert numpy containers/scalars; non-finite floats become null."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def dumps(obj) -> str:
    """Stable JSON text: sorted keys, round-trip float repr, trailing newline."""
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def load_schema(name) -> dict:
    if name not in SCHEMA_NAMES:
        raise KeyError(name)
    text = resources.files("dantzig_lab").joinpath("schemas", f"{name}.json").read_text()
    return json.loads(text)


def fixture_path(name):
    """Path to a CSV shipped in ``dantzig_lab/data``."""
    return resources.files("dantzig_lab").joinpath("data", name)
