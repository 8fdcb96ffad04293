"""Run manifests: a command, its parameters and output paths, validated by schema."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Dict

from pilab.cli.jsonfmt import dumps
from pilab.errors import SchemaViolation

COMMANDS = ("hierarchy", "gfun", "painleve", "kdv", "compare")

_FLOATS = "floats"       # list of floats


# parameter name -> type tag; "actions" lists allowed values of the action key
SCHEMAS: Dict[str, Dict[str, Any]] = {
    "hierarchy": {"actions": ("gen",),
                  "params": {"action": str, "m": int, "format": str, "allow_odd": bool}},
    "gfun": {"actions": None, "params": {"m": int, "sign": int}},
    "painleve": {"actions": ("solve",),
                 "params": {"action": str, "m": int, "t": _FLOATS, "S": float, "N": int,
                            "stencil_order": int, "newton_tol": float}},
    "kdv": {"actions": ("critical", "run", "compare"),
            "params": {"action": str, "m": int, "data": str, "eps": _FLOATS, "t": float,
                       "L": float, "N": int, "dt": float, "window": _FLOATS, "n_s": int,
                       "n_t": int}},
    "compare": {"actions": None,
                "params": {"m": int, "data": str, "eps": _FLOATS, "N": int, "window": _FLOATS,
                           "n_s": int, "n_t": int}},
}
OUTPUT_KEYS = ("csv", "json")
REQUIRED = {"hierarchy": ("action", "m"), "gfun": ("m",), "painleve": ("action", "m"),
            "kdv": ("action",), "compare": ("m", "eps")}


def _check_type(value, tag, where):
    if tag is _FLOATS:
        if not isinstance(value, list) or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
            raise SchemaViolation(f"{where}: expected a list of numbers", path=where)
        return [float(v) for v in value]
    if tag is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SchemaViolation(f"{where}: expected a number", path=where)
        return float(value)
    if tag is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise SchemaViolation(f"{where}: expected an integer", path=where)
        return value
    if not isinstance(value, tag):
        raise SchemaViolation(f"{where}: expected {tag.__name__}", path=where)
    return value


@dataclass(frozen=True)
class RunManifest:
    command: str
    parameters: Dict[str, Any] = field(default_factory=dict)
    outputs: Dict[str, str] = field(default_factory=dict)

    def validate(self, where: str = "manifest") -> "RunManifest":
        if self.command not in COMMANDS:
            raise SchemaViolation(f"{where}.command: unknown command {self.command!r}",
                                  path=f"{where}.command")
        schema = SCHEMAS[self.command]
        for key, value in self.parameters.items():
            if key not in schema["params"]:
                raise SchemaViolation(f"{where}.parameters.{key}: unknown key for "
                                      f"{self.command}", path=f"{where}.parameters.{key}")
            _check_type(value, schema["params"][key], f"{where}.parameters.{key}")
        for key in REQUIRED[self.command]:
            if key not in self.parameters:
                raise SchemaViolation(f"{where}.parameters.{key}: required", path=f"{where}.parameters.{key}")
        acts = schema["actions"]
        if acts and self.parameters.get("action") not in acts:
            raise SchemaViolation(f"{where}.parameters.action: must be one of {acts}",
                                  path=f"{where}.parameters.action")
        for key, value in self.outputs.items():
            if key not in OUTPUT_KEYS or not isinstance(value, str):
                raise SchemaViolation(f"{where}.outputs.{key}: unknown output or non-string path",
                                      path=f"{where}.outputs.{key}")
        return self

    def to_obj(self) -> dict:
        return {"command": self.command, "parameters": dict(self.parameters),
                "outputs": dict(self.outputs)}

    def to_json(self) -> str:
        return dumps(self.to_obj())

    @classmethod
    def from_obj(cls, obj, where: str = "manifest") -> "RunManifest":
        if not isinstance(obj, dict):
            raise SchemaViolation(f"{where}: expected an object", path=where)
        extra = set(obj) - {"command", "parameters", "outputs"}
        if extra:
            key = sorted(extra)[0]
            raise SchemaViolation(f"{where}.{key}: unknown key", path=f"{where}.{key}")
        if "command" not in obj:
            raise SchemaViolation(f"{where}.command: required", path=f"{where}.command")
        params = obj.get("parameters", {})
        outputs = obj.get("outputs", {})
        if not isinstance(params, dict) or not isinstance(outputs, dict):
            raise SchemaViolation(f"{where}: parameters and outputs must be objects", path=where)
        return cls(obj["command"], params, outputs).validate(where)

    @classmethod
    def from_json(cls, text: str, where: str = "manifest") -> "RunManifest":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaViolation(f"{where}: {exc}", path=where) from None
        return cls.from_obj(obj, where)
