"""Plane formation by oblivious FSYNC mobile robots in 3D space."""

__version__ = "1.0.0"

__all__ = ["__version__"]
