"""Command-line interface, manifests and deterministic output."""

from pilab.cli.manifest import RunManifest
from pilab.cli.runner import run

__all__ = ["RunManifest", "run"]
