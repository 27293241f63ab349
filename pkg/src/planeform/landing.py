"""Landing phase: agree on a plane F and choose distinct landing points on it."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .conditions import ConfigurationAnalysis, analyze_configuration
from .errors import FormationError
from .geometry import (
    Plane,
    PointsLike,
    Tolerance,
    has_multiplicity,
    lexicographic_order,
    rotate_about,
)
from .symmetry import GroupKind

logger = logging.getLogger(__name__)


def _select_plane(analysis: ConfigurationAnalysis) -> Plane:
    conditions = analysis.conditions
    if conditions.t3:
        raise FormationError("already planar")
    if not conditions.t2:
        raise FormationError("wrong phase: plane selection needs a 2D rotation group")

    group = analysis.group
    b = analysis.center
    if group.kind is GroupKind.CYCLIC and group.k == 1:
        decomposition = analysis.decomposition
        if not decomposition.ordered:
            raise FormationError("local views undefined with a robot at b(P)")
        (star,) = decomposition.orbits[0]
        meridian = decomposition.views[0].meridian
        normal = np.cross(analysis.points[star] - b, analysis.points[meridian] - b)
        return Plane.through(b, normal)
    if group.principal is None:
        raise FormationError(f"group {group.label} has no principal axis")
    return Plane.through(b, group.principal)


def select_plane(local_obs: PointsLike, tol: Optional[Tolerance] = None) -> Plane:
    """Plane through b(P) every robot agrees on, independent of local frames."""
    return _select_plane(analyze_configuration(local_obs, tol))


@dataclass
class _Reserved:
    """Expected landing points and whole reserved circles on F."""

    points: List[np.ndarray] = field(default_factory=list)
    circles: List[Tuple[np.ndarray, float]] = field(default_factory=list)

    def obstacle_distances(self, f: np.ndarray) -> List[float]:
        distances = [float(np.linalg.norm(f - q)) for q in self.points]
        distances += [abs(float(np.linalg.norm(f - c)) - rho) for c, rho in self.circles]
        return distances

    def hits(self, f: np.ndarray, eps: float) -> bool:
        return any(d <= eps for d in self.obstacle_distances(f))


def _clear_radius(f: np.ndarray, reserved: _Reserved, feet: np.ndarray, eps: float, fallback: float) -> float:
    """Radius of the largest circle around f empty of other landing points."""
    distances = reserved.obstacle_distances(f)
    distances += [float(d) for d in np.linalg.norm(feet - f, axis=1)]
    positive = [d for d in distances if d > eps]
    return min(positive) if positive else fallback


def _polygon_directions(analysis: ConfigurationAnalysis, plane: Plane) -> np.ndarray:
    """Unit directions from b(P) to the vertices of the regular |gamma|-gon Q(P)."""
    group = analysis.group
    b = analysis.center
    if group.kind is GroupKind.DIHEDRAL:
        axes = [
            axis.direction for axis in group.axes
            if axis.fold == 2 and abs(float(np.dot(axis.direction, group.principal))) <= 1e-6
        ]
        directions = np.array([sign * u for u in axes for sign in (1.0, -1.0)])
    else:
        k = group.k
        polygon = None
        for orbit in reversed(analysis.decomposition.orbits):
            if len(orbit) == k:
                polygon = analysis.points[list(orbit)]
                break
        if polygon is None:
            raise FormationError(f"no regular {k}-gon orbit to span Q(P)")
        directions = plane.project(polygon) - plane.project(b[None, :])
    directions = directions - np.outer(directions @ plane.normal, plane.normal)
    return directions / np.linalg.norm(directions, axis=1)[:, None]


def _perturb_at_center(
    analysis: ConfigurationAnalysis, plane: Plane, rho: float, up: np.ndarray
) -> np.ndarray:
    b = analysis.center
    group = analysis.group
    if group.kind is GroupKind.CYCLIC and group.k == 1:
        # Any point of the circle works: the whole circle is reserved
        for local_axis in (np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0])):
            direction = local_axis - float(np.dot(local_axis, plane.normal)) * plane.normal
            if np.linalg.norm(direction) > 1e-6:
                return b + rho * direction / np.linalg.norm(direction)
    directions = _polygon_directions(analysis, plane)
    vertices = b + analysis.ball.radius * directions
    chosen = directions[lexicographic_order(vertices, analysis.eps)[0]]
    q = b + rho * chosen
    return rotate_about(q[None, :], b, up, -2.0 * math.pi / (4 * group.order))[0]


def landing_points(analysis: ConfigurationAnalysis, plane: Plane) -> np.ndarray:
    """Expected landing point of every robot, orbit by orbit in agreed order.

    Robots whose foot was perturbed at b(P) get the point this observer
    would pick; other observers only rely on the reserved circle.
    """
    S = analysis.points
    b = analysis.center
    eps = analysis.eps
    on_plane = plane.contains(S, eps)
    feet = plane.project(S)
    feet[on_plane] = S[on_plane]

    reserved = _Reserved(points=[S[i] for i in np.flatnonzero(on_plane)])
    destinations = S.copy()
    for orbit in analysis.decomposition.orbits:
        movers = [i for i in orbit if not on_plane[i]]
        if not movers:
            continue
        mover_feet = feet[movers]
        collision = has_multiplicity(mover_feet, eps) or any(reserved.hits(f, eps) for f in mover_feet)
        if not collision:
            for i in movers:
                destinations[i] = feet[i]
                reserved.points.append(feet[i])
            continue

        # Within one orbit only a mirror pair can share a foot
        shared = np.sum(np.linalg.norm(mover_feet[:, None, :] - mover_feet[None, :, :], axis=2) <= eps, axis=1)
        if int(shared.max()) > 2:
            raise FormationError("more than two robots of one orbit share a foot on F")

        radius = min(_clear_radius(feet[i], reserved, mover_feet, eps, analysis.ball.radius) for i in movers)
        rho = radius / 4.0
        logger.debug(f"Perturbing {len(movers)} landing points with radius {rho:.6g}")
        new_points, new_circles = [], []
        for i in movers:
            f = feet[i]
            up = (S[i] - f) / np.linalg.norm(S[i] - f)
            if float(np.linalg.norm(f - b)) > eps:
                q = f + rho * (b - f) / np.linalg.norm(b - f)
                # Clockwise as seen from the robot looking down onto F
                destinations[i] = rotate_about(q[None, :], f, up, -math.pi / 2.0)[0]
                new_points.append(destinations[i])
            else:
                destinations[i] = _perturb_at_center(analysis, plane, rho, up)
                new_circles.append((b.copy(), rho))
        reserved.points.extend(new_points)
        reserved.circles.extend(new_circles)
    return destinations


def select_destination(
    local_obs: PointsLike, F: Plane, self: int, tol: Optional[Tolerance] = None
) -> np.ndarray:
    """Landing point of robot ``self`` on F, distinct from every other robot's."""
    return landing_points(analyze_configuration(local_obs, tol), F)[self]


def land_from_analysis(analysis: ConfigurationAnalysis, self: int) -> np.ndarray:
    conditions = analysis.conditions
    if conditions.t3:
        return analysis.points[self].copy()
    if not (conditions.t1 and conditions.t2):
        raise FormationError(f"wrong phase: landing needs T1 and T2, phase is {conditions.phase}")
    return landing_points(analysis, _select_plane(analysis))[self]


def land(local_obs: PointsLike, self: int, tol: Optional[Tolerance] = None) -> np.ndarray:
    """Move straight to the landing point chosen on the agreed plane."""
    return land_from_analysis(analyze_configuration(local_obs, tol), self)
