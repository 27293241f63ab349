"""Exception hierarchy shared by the library and the command line."""

from __future__ import annotations

from typing import Optional


class PlaneformError(Exception):
    """Base class for every failure raised by planeform."""


class GeometryError(PlaneformError, ValueError):
    """Invalid geometric input (empty sets, occupied centers, degenerate bases)."""


class SymmetryError(PlaneformError):
    """Rotation-group enumeration or classification failed."""


class DecompositionError(PlaneformError):
    """Orbit decomposition or local view is undefined for the input."""


class FormationError(PlaneformError):
    """An algorithm was invoked outside its precondition."""


class UnsolvableConfigurationError(FormationError):
    """The configuration admits no plane formation algorithm."""


class AdversaryError(PlaneformError):
    """Symmetric frames cannot be built for the configuration."""


class ScenarioError(PlaneformError):
    """Scenario or point file could not be parsed."""

    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None):
        self.line = line
        self.field = field
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field is not None:
            location.append(f"field '{field}'")
        super().__init__(f"{message} ({', '.join(location)})" if location else message)
