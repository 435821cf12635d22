"""Experiment configuration: JSON schema, defaults and instance construction.

A config names an action (a sequence spec, optionally realized through a
finite wreath quotient, or a seeded random abelian family), vectors, an index
schedule and metastability parameters.  All randomness comes from
``numpy.random.default_rng(seed)`` (PCG64), default seed 42.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

from .averaging import UnitaryAction
from .errors import PolymetError
from .instances import random_abelian_action, random_unit_vector
from .leibman import sequence_from_json

DEFAULT_SEED = 42

SCHEMA = {
    "type": "object",
    "properties": {
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "action": {
            "type": "object",
            "required": ["kind"],
            "properties": {
                "kind": {"type": "string"},
                "dim": {"type": "integer", "minimum": 1},
                "degree": {"type": "integer", "minimum": 0},
                "rep": {
                    "type": "object",
                    "required": ["m", "n"],
                    "properties": {"m": {"type": "integer", "minimum": 2},
                                   "n": {"type": "integer", "minimum": 2}},
                },
            },
        },
        "x": {
            "oneOf": [
                {"type": "array", "items": {"type": "number"}, "minItems": 1},
                {"const": "random_unit"},
            ]
        },
        "folner": {"type": ["string", "object"]},
        "schedule": {
            "type": "object",
            "properties": {
                "n_values": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1},
                "start": {"type": "integer", "minimum": 0},
                "stop": {"type": "integer", "minimum": 0},
                "step": {"type": "integer", "minimum": 1},
                "window_end": {"type": "integer", "minimum": 0},
            },
        },
        "metastability": {
            "type": "object",
            "properties": {
                "eps": {"type": "number"},
                "sampling": {"type": "string"},
                "instances": {"type": "integer", "minimum": 1},
                "bound": {"type": "integer", "minimum": 0},
                "start": {"type": "integer", "minimum": 0},
            },
        },
    },
    "required": ["action"],
}

RUN_SCHEMA = {**SCHEMA, "required": ["action", "x", "schedule"]}


class ConfigError(PolymetError):
    """Schema violation; ``pointer`` is a JSON pointer to the offending field."""

    def __init__(self, message: str, pointer: str):
        super().__init__(f"{pointer}: {message}")
        self.pointer = pointer
        self.message = message


def _pointer(err: jsonschema.ValidationError) -> str:
    path = list(err.absolute_path)
    if err.validator == "required":
        # the missing name is quoted first in the message
        path.append(err.message.split("'")[1])
    return "/" + "/".join(str(p) for p in path)


def validate(raw: dict, schema: dict = SCHEMA) -> None:
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(raw), key=lambda e: (list(e.absolute_path), e.message))
    if errors:
        raise ConfigError(errors[0].message, _pointer(errors[0]))


@dataclass
class Metastability:
    eps: float = 0.2
    sampling: str = "{i, 2i}"
    instances: int = 50
    bound: int = 100_000
    start: int = 0


@dataclass
class ExperimentConfig:
    action: dict
    seed: int = DEFAULT_SEED
    x: list | str | None = None
    folner: str | dict = "z_initial_segments"
    schedule: dict = field(default_factory=dict)
    metastability: Metastability = field(default_factory=Metastability)

    @classmethod
    def from_dict(cls, raw: dict, schema: dict = SCHEMA) -> "ExperimentConfig":
        validate(raw, schema)
        meta = Metastability(**raw.get("metastability", {}))
        return cls(action=raw["action"], seed=raw.get("seed", DEFAULT_SEED), x=raw.get("x"),
                   folner=raw.get("folner", "z_initial_segments"),
                   schedule=raw.get("schedule", {}), metastability=meta)

    @classmethod
    def load(cls, path, schema: dict = SCHEMA) -> "ExperimentConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON ({exc.msg})", "") from exc
        return cls.from_dict(raw, schema)

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    def n_values(self) -> list[int]:
        s = self.schedule
        if "n_values" in s:
            return sorted(set(s["n_values"]))
        if "stop" in s:
            return list(range(s.get("start", 0), s["stop"] + 1, s.get("step", 1)))
        raise ConfigError("schedule needs n_values or stop", "/schedule")

    def window_end(self) -> int:
        return max(self.schedule.get("window_end", 0), max(self.n_values()))


def build_action(spec: dict, rng: np.random.Generator) -> UnitaryAction:
    """Action from its config entry; random kinds draw from ``rng``."""
    spec = dict(spec)
    if spec["kind"] == "random_abelian":
        return random_abelian_action(rng, dim=spec.get("dim"), degree=spec.get("degree", 2))
    rep = spec.pop("rep", None)
    seq = sequence_from_json(spec)
    if rep is not None:
        return UnitaryAction.from_lamplighter(seq, rep["m"], rep["n"])
    return UnitaryAction(seq)


def build_vector(x, dim: int, rng: np.random.Generator) -> np.ndarray:
    if x is None or x == "random_unit":
        return random_unit_vector(rng, dim)
    return np.asarray(x, dtype=float)


def build_instances(cfg: ExperimentConfig, count: int) -> list[tuple[UnitaryAction, np.ndarray]]:
    """``count`` (action, vector) pairs drawn in order from one generator."""
    rng = cfg.rng()
    out = []
    for _ in range(count):
        T = build_action(cfg.action, rng)
        out.append((T, build_vector(cfg.x, T.dim, rng)))
    return out
