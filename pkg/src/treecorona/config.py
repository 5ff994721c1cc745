"""Run configuration: JSON files validated against a published schema."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from .group_action import GroupAction, make_action
from .tree import FamilyMismatch

__all__ = ["CONFIG_SCHEMA", "ConfigError", "RunConfig", "load_config", "parse_config"]

CHECKS = ("positivity", "gram", "defect", "stability", "l1", "decay", "oracle")

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "treecorona run configuration",
    "type": "object",
    "additionalProperties": False,
    "required": ["family"],
    "properties": {
        "family": {"type": "string", "minLength": 1},
        "gamma1": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "i": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "n": {
            "oneOf": [
                {"const": "auto"},
                {"type": "integer", "minimum": 1},
            ]
        },
        "checks": {"type": "array", "items": {"enum": list(CHECKS)}, "uniqueItems": True},
        "oracle_window": {"enum": ["auto", "full"]},
        "oracle_max_window": {"type": "integer", "minimum": 1},
        "sequences": {
            "type": "array",
            "items": {
                "oneOf": [
                    {"type": "string"},
                    {"type": "object", "required": ["name"], "properties": {"name": {"type": "string"}}},
                ]
            },
        },
        "stages": {"type": "integer", "minimum": 2},
        "space": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["segment", "tree"]},
                "radius": {"type": "integer", "minimum": 1},
                "family": {"type": "string"},
            },
        },
        "out": {"type": "string"},
        "format": {"enum": ["csv", "json"]},
    },
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    family: str
    action: GroupAction
    gamma1: list
    i_values: list
    n_policy: object = "auto"
    checks: tuple = CHECKS[:-1]
    oracle_window: str = "auto"
    oracle_max_window: int = 200000
    sequences: list = field(default_factory=lambda: ["bump", "reciprocal", "embed", "product", "table"])
    stages: int = 50
    space: dict = field(default_factory=lambda: {"kind": "segment", "radius": 110})
    out: str | None = None
    format: str = "csv"

    def n_for(self, g1, i: int) -> int:
        if self.n_policy == "auto":
            return i + self.action.displacement(g1) + 2
        return int(self.n_policy)


def parse_config(data: dict) -> RunConfig:
    try:
        jsonschema.validate(data, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{path}: {exc.message}") from None
    try:
        action = make_action(data["family"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    words = data.get("gamma1", [action.format(action.identity)])
    try:
        gamma1 = [action.parse(w) for w in words]
    except (FamilyMismatch, ValueError) as exc:
        raise ConfigError(f"gamma1: {exc}") from None
    kw = {k: data[k] for k in ("oracle_window", "oracle_max_window", "sequences", "stages", "out", "format") if k in data}
    if "space" in data:
        kw["space"] = {"kind": "segment", "radius": 110, **data["space"]}
    return RunConfig(
        family=action.tag,
        action=action,
        gamma1=gamma1,
        i_values=list(data.get("i", [1, 2, 4, 8])),
        n_policy=data.get("n", "auto"),
        checks=tuple(c for c in CHECKS if c in data["checks"]) if "checks" in data else CHECKS[:-1],
        **kw,
    )


def load_config(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    return parse_config(data)
