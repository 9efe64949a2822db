"""Deterministic CSV/JSON writers with 17 significant digits for floats."""

from __future__ import annotations

import json
import math

import numpy as np

__all__ = ["format_float", "to_json", "to_csv"]


def format_float(x) -> str:
    return format(float(x), ".17g")


def _plain(obj):
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return [_plain(x) for x in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(x) for x in obj]
    return obj


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, float):
        return format_float(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(x, (dict, list)) for x in obj):
            return "[" + ", ".join(_encode(x, indent, level + 1) for x in obj) + "]"
        return "[\n" + ",\n".join(pad + _encode(x, indent, level + 1) for x in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def to_json(obj, indent: int = 2) -> str:
    """JSON text with floats at 17 significant digits and non-finite floats as null."""
    return _encode(_plain(obj), indent, 0) + "\n"


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    return str(v)


def to_csv(header, rows) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(_cell(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"
