"""Phase predicates T1/T2/T3 and the per-observation analysis they rest on."""

from __future__ import annotations

import logging
import threading
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, Optional, Sequence, Tuple

import numpy as np

from .decomposition import OrbitDecomposition, gamma_decomposition
from .errors import GeometryError
from .geometry import (
    Ball,
    PointsLike,
    Tolerance,
    as_points,
    has_multiplicity,
    innermost_empty_ball,
    is_coplanar,
    resolve_tolerance,
    smallest_enclosing_ball,
)
from .solvability import SYMMETRIC_ORBIT_SIZES
from .symmetry import GroupClass, rotation_group

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Conditions:
    t1: bool
    t2: bool
    t3: bool

    def __post_init__(self):
        if (self.t2 or self.t3) and not self.t1:
            raise ValueError("T2 and T3 imply T1")
        if self.t3 and not self.t2:
            raise ValueError("T3 implies T2")

    @property
    def phase(self) -> str:
        if not self.t1:
            return "prepare"
        if not self.t2:
            return "break"
        if not self.t3:
            return "land"
        return "terminal"

    def as_tuple(self) -> Tuple[bool, bool, bool]:
        return (self.t1, self.t2, self.t3)


@dataclass(frozen=True, eq=False)
class ConfigurationAnalysis:
    """Everything one robot derives from a single observation."""

    points: np.ndarray
    tol: Tolerance
    ball: Ball
    eps: float
    coplanar: bool
    center_index: Optional[int]
    group: GroupClass
    decomposition: OrbitDecomposition
    conditions: Conditions

    @property
    def center(self) -> np.ndarray:
        return self.ball.center

    @property
    def inner_radius(self) -> Optional[float]:
        if self.center_index is not None:
            return None
        return innermost_empty_ball(self.points, self.center, self.tol).radius

    def breakable_orbit(self) -> Optional[int]:
        """Smallest orbit index whose size lies outside {12, 24, 60}."""
        for index, size in enumerate(self.decomposition.sizes):
            if size not in SYMMETRIC_ORBIT_SIZES:
                return index
        return None

    @property
    def unsolvable(self) -> bool:
        return (
            self.group.is_3d
            and self.center_index is None
            and all(size in SYMMETRIC_ORBIT_SIZES for size in self.decomposition.sizes)
        )

    def in_frame(
        self,
        local: np.ndarray,
        rotation: np.ndarray,
        scale: float,
        origin: Sequence[float],
        order: Sequence[int],
    ) -> ConfigurationAnalysis:
        """This analysis for the observation local = ((points - origin) @ rotation / scale)[order].

        Every robot of one snapshot would derive exactly this from its own
        observation, so one analysis per cycle serves all of them.
        """
        R = np.asarray(rotation, dtype=float)
        o = np.asarray(origin, dtype=float)
        index = np.empty(len(order), dtype=int)
        index[np.asarray(order, dtype=int)] = np.arange(len(order))
        center = (self.center - o) @ R / scale
        ball = Ball(center, self.ball.radius / scale, tuple(int(index[j]) for j in self.ball.support))
        eps = self.tol.eps(ball.radius)
        group = self.group.conjugated(R)
        radii = np.linalg.norm(local - center, axis=1)
        return ConfigurationAnalysis(
            points=local,
            tol=self.tol,
            ball=ball,
            eps=eps,
            coplanar=self.coplanar,
            center_index=None if self.center_index is None else int(index[self.center_index]),
            group=group,
            decomposition=self.decomposition.relabeled(index, group, center, radii, eps),
            conditions=self.conditions,
        )


_SEEDED: Dict[Tuple, ConfigurationAnalysis] = {}
_SEEDED_LOCK = threading.Lock()


def _seed_key(points: np.ndarray, tol: Tolerance) -> Tuple:
    return (points.shape, points.tobytes(), tol)


@contextmanager
def seeded_analyses(analyses: Iterable[ConfigurationAnalysis]) -> Iterator[None]:
    """Answer analyze_configuration from these analyses for their exact observations."""
    keys = []
    with _SEEDED_LOCK:
        for analysis in analyses:
            key = _seed_key(analysis.points, analysis.tol)
            _SEEDED[key] = analysis
            keys.append(key)
    try:
        yield
    finally:
        with _SEEDED_LOCK:
            for key in keys:
                _SEEDED.pop(key, None)


def analyze_configuration(P: PointsLike, tol: Optional[Tolerance] = None) -> ConfigurationAnalysis:
    tol = resolve_tolerance(tol)
    S = as_points(P)
    seeded = _SEEDED.get(_seed_key(S, tol))
    if seeded is not None:
        return seeded
    if len(S) == 0:
        raise GeometryError("empty point set")
    ball = smallest_enclosing_ball(S, tol)
    eps = tol.eps(ball.radius)
    if has_multiplicity(S, eps):
        raise GeometryError("multiplicity")

    coplanar = len(S) <= 3 or is_coplanar(S, tol, scale=ball.radius)
    radii = np.linalg.norm(S - ball.center, axis=1)
    center_index = int(np.argmin(radii)) if float(radii.min()) <= eps else None
    group = rotation_group(S, tol, center=ball.center)
    decomposition = gamma_decomposition(S, tol, group=group, center=ball.center)

    t3 = coplanar
    t2 = t3 or group.is_2d
    t1 = t2 or decomposition.sizes[0] not in SYMMETRIC_ORBIT_SIZES
    return ConfigurationAnalysis(
        points=S,
        tol=tol,
        ball=ball,
        eps=eps,
        coplanar=coplanar,
        center_index=center_index,
        group=group,
        decomposition=decomposition,
        conditions=Conditions(t1, t2, t3),
    )


def eval_conditions(P: PointsLike, tol: Optional[Tolerance] = None) -> Conditions:
    """T1: no symmetric innermost orbit; T2: 2D rotation group; T3: coplanar."""
    return analyze_configuration(P, tol).conditions
