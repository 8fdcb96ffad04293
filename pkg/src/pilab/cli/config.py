"""Flat INI configuration files with [data], [grid] and [compare] sections."""

from __future__ import annotations

import configparser
from pathlib import Path
from typing import Dict

from pilab.errors import SchemaViolation

ALLOWED = {
    "data": {"mode": str, "m": int, "x_M": float, "width": float, "beta": float, "u_c": str,
             "slope": str, "top": str, "u_tail": float, "L": float},
    "grid": {"L": float, "N": int, "dt": float},
    "compare": {"eps": "floats", "window_s": "floats", "window_t1": "floats", "n_s": int,
                "n_t": int},
}


def _convert(raw: str, tag, where):
    try:
        if tag == "floats":
            return [float(v) for v in raw.split(",") if v.strip()]
        return tag(raw.strip())
    except ValueError:
        raise SchemaViolation(f"{where}: cannot parse {raw!r}", path=where) from None


def load_config(path) -> Dict[str, Dict[str, object]]:
    path = Path(path)
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        with path.open() as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise SchemaViolation(f"{path}: {exc.strerror}", path=str(path)) from None
    except configparser.Error as exc:
        raise SchemaViolation(f"{path}: {exc}", path=str(path)) from None
    out: Dict[str, Dict[str, object]] = {}
    for section in cp.sections():
        if section not in ALLOWED:
            raise SchemaViolation(f"{path}:[{section}]: unknown section", path=f"{path}:[{section}]")
        out[section] = {}
        for key, raw in cp.items(section):
            where = f"{path}:[{section}].{key}"
            if key not in ALLOWED[section]:
                raise SchemaViolation(f"{where}: unknown key", path=where)
            out[section][key] = _convert(raw, ALLOWED[section][key], where)
    return out
