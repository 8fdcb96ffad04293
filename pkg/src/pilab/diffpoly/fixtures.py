"""Reference forms of the m = 0..4 equations, stored as DiffPoly JSON."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from pilab.diffpoly.ring import DiffPoly
from pilab.errors import SchemaViolation

FIXTURE_ORDERS = (0, 1, 2, 3, 4)


def fixture_path(m: int) -> Path:
    return Path(str(resources.files("pilab") / "data" / "fixtures" / f"pi_m{m}.json"))


def load_fixture_file(path) -> DiffPoly:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SchemaViolation(f"{path}: {exc.strerror}", path=str(path)) from None
    return DiffPoly.from_json(text, where=str(path))


def load_fixture(m: int) -> DiffPoly:
    if m not in FIXTURE_ORDERS:
        raise ValueError(f"no fixture for m={m}")
    return load_fixture_file(fixture_path(m))
