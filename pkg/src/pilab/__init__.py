"""Painleve I hierarchy laboratory."""
__version__ = "0.1.0"
