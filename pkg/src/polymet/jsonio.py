"""Deterministic JSON/CSV number formatting: floats carry 17 significant digits."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, is_dataclass
from fractions import Fraction

import numpy as np


def fmt_float(x: float) -> str:
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return json.dumps(str(x))
    return format(x, ".17g")


def _encode(obj, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1)) if indent else ""
    end = "\n" + " " * (indent * level) if indent else ""
    sep = "," + pad if indent else ", "
    if is_dataclass(obj) and not isinstance(obj, type):
        obj = obj.to_json() if hasattr(obj, "to_json") else asdict(obj)
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(bool(obj) if obj is not None else None)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if isinstance(obj, Fraction):
        return json.dumps(str(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{" + pad + sep.join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[" + pad + sep.join(_encode(v, indent, level + 1) for v in obj) + end + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    return _encode(obj, indent, 0)
