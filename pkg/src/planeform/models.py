from __future__ import annotations

from typing import Any, Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from .adversary import adversary_group, build_symmetric_frames
from .config import SETTINGS
from .geometry import Tolerance, as_points, has_multiplicity, smallest_enclosing_ball
from .polyhedra import GENERATOR_NAMES, generate_polyhedron
from .simulation import Frame, random_frames
from .symmetry import GroupKind


class PointSource(BaseModel):
    """Either a named generator with parameters or an explicit point list."""

    generator: Optional[str] = Field(default=None, description="Polyhedron generator name")
    circumradius: float = Field(default=1.0, gt=0, description="Circumradius for generated sets")
    params: Dict[str, Any] = Field(default_factory=dict, description="Generator parameters")
    explicit: Optional[List[Tuple[float, float, float]]] = Field(default=None, description="Explicit positions")

    @field_validator("generator")
    @classmethod
    def validate_generator(cls, v):
        if v is None:
            return v
        name = v.strip().lower()
        if name not in GENERATOR_NAMES:
            raise ValueError(f"unknown generator {v!r}")
        return name

    @model_validator(mode="after")
    def validate_source(self):
        if (self.generator is None) == (self.explicit is None):
            raise ValueError("give exactly one of a generator or explicit points")
        if self.explicit is not None and not self.explicit:
            raise ValueError("explicit point list is empty")
        if self.explicit is not None and self.params:
            raise ValueError("explicit points take no generator parameters")
        return self

    def build(self) -> np.ndarray:
        if self.explicit is not None:
            return as_points(self.explicit)
        return generate_polyhedron(self.generator, self.circumradius, **self.params)

    model_config = {"extra": "forbid", "str_strip_whitespace": True}


class ExplicitFrame(BaseModel):
    rotation: Tuple[Tuple[float, float, float], Tuple[float, float, float], Tuple[float, float, float]]
    scale: float = Field(default=1.0, gt=0)

    @field_validator("rotation")
    @classmethod
    def validate_rotation(cls, v):
        R = np.asarray(v, dtype=float)
        if not np.allclose(R.T @ R, np.eye(3), atol=1e-9):
            raise ValueError("rotation must be orthonormal")
        if np.linalg.det(R) <= 0:
            raise ValueError("rotation must be right-handed (det +1)")
        return v

    model_config = {"extra": "forbid"}


class FrameSpec(BaseModel):
    mode: Literal["random", "adversarial", "explicit"] = "random"
    seed: Optional[int] = Field(default=None, ge=0, description="Seed for random or adversarial frames")
    group: Optional[str] = Field(default=None, description="Adversary group T, O or I")
    explicit: Optional[List[ExplicitFrame]] = None

    @field_validator("group")
    @classmethod
    def validate_group(cls, v):
        if v is None:
            return v
        kind = GroupKind.from_symbol(v)
        if kind not in (GroupKind.TETRAHEDRAL, GroupKind.OCTAHEDRAL, GroupKind.ICOSAHEDRAL):
            raise ValueError("adversary group must be T, O or I")
        return kind.symbol

    @model_validator(mode="after")
    def validate_mode(self):
        if self.mode == "explicit" and not self.explicit:
            raise ValueError("explicit frame mode needs frame rows")
        if self.mode != "explicit" and self.explicit:
            raise ValueError(f"frame rows are only allowed in explicit mode, not {self.mode}")
        if self.group is not None and self.mode != "adversarial":
            raise ValueError("an adversary group needs adversarial frame mode")
        return self

    model_config = {"extra": "forbid", "str_strip_whitespace": True}


class Scenario(BaseModel):
    points: PointSource
    frames: FrameSpec = Field(default_factory=FrameSpec)
    algorithm: Literal["plane_formation", "go_to_midpoint"] = "plane_formation"
    max_cycles: int = Field(default_factory=lambda: SETTINGS.max_cycles, ge=1, le=10000)
    tolerance: Optional[float] = Field(default=None, gt=0, lt=1, description="Relative tolerance override")
    guard: bool = Field(default=True, description="Refuse unsolvable inputs instead of looping")

    model_config = {
        "extra": "forbid",
        "validate_assignment": True,
    }

    def tolerance_object(self) -> Tolerance:
        base = Tolerance.default()
        if self.tolerance is None:
            return base
        return Tolerance(relative=self.tolerance, absolute=base.absolute, angular=base.angular)

    def build_points(self) -> np.ndarray:
        """Initial configuration; distinctness is checked here rather than in the model."""
        points = self.points.build()
        tol = self.tolerance_object()
        if has_multiplicity(points, tol.eps(smallest_enclosing_ball(points, tol).radius)):
            raise ValueError("scenario points are not distinct")
        return points

    def build_frames(self, points: np.ndarray) -> List[Frame]:
        if self.frames.mode == "explicit":
            if len(self.frames.explicit) != len(points):
                raise ValueError(f"{len(self.frames.explicit)} frames for {len(points)} points")
            return [Frame(np.asarray(f.rotation, dtype=float), f.scale, p) for f, p in zip(self.frames.explicit, points)]
        if self.frames.mode == "adversarial":
            tol = self.tolerance_object()
            kind = GroupKind.from_symbol(self.frames.group) if self.frames.group else adversary_group(points, tol)
            return build_symmetric_frames(points, kind, self.frames.seed, tol)
        return random_frames(points, self.frames.seed)
