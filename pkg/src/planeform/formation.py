"""Plane formation algorithm: preparation, symmetry breaking and dispatch.

Every function takes one robot's observation in its own frame and returns
that robot's destination in the same frame.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import ConvexHull, cKDTree

from .conditions import ConfigurationAnalysis, analyze_configuration
from .config import SETTINGS
from .errors import FormationError, UnsolvableConfigurationError
from .geometry import (
    PointsLike,
    Tolerance,
    as_points,
    innermost_empty_ball,
    lexicographic_order,
    min_pairwise_distance,
    resolve_tolerance,
    rotate_about,
    smallest_enclosing_ball,
)
from .landing import land_from_analysis

logger = logging.getLogger(__name__)

# Face signature (vertex count, {face size: count}) of every orbit the breaker accepts
BREAKABLE_SOLIDS: Dict[str, Tuple[int, Dict[int, int]]] = {
    "tetrahedron": (4, {3: 4}),
    "octahedron": (6, {3: 8}),
    "cube": (8, {4: 6}),
    "dodecahedron": (20, {5: 12}),
    "icosidodecahedron": (30, {3: 20, 5: 12}),
}

# Vertex degree of each regular polyhedron, keyed by vertex count
REGULAR_DEGREES = {4: 3, 6: 4, 8: 3, 12: 5, 20: 3}

# Unguarded step on unsolvable input: the innermost orbit turns about the local z-axis through b(P)
SYMMETRIC_TURN = 2.0 * math.pi / 7.0
LOCAL_Z = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True)
class FaceChoice:
    """Rank of the incident face a robot picks, in its own lexicographic order."""

    rank: int = 0

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError(f"face rank must be nonnegative, got {self.rank}")


def _epsilon_ratio(epsilon_ratio: Optional[float]) -> float:
    ratio = SETTINGS.break_epsilon_ratio if epsilon_ratio is None else epsilon_ratio
    if not 0.0 < ratio < 0.5:
        raise ValueError(f"epsilon ratio must lie in (0, 0.5), got {ratio}")
    return ratio


def polyhedron_faces(vertices: PointsLike, eps: float) -> List[Tuple[int, ...]]:
    """Faces of the convex hull, merging coplanar hull triangles."""
    V = as_points(vertices)
    hull = ConvexHull(V)
    faces: List[set] = []
    planes: List[np.ndarray] = []
    for simplex, equation in zip(hull.simplices, hull.equations):
        for face, plane in zip(faces, planes):
            if float(np.dot(equation[:3], plane[:3])) >= 1.0 - 1e-6 and abs(equation[3] - plane[3]) <= eps:
                face.update(int(i) for i in simplex)
                break
        else:
            faces.append({int(i) for i in simplex})
            planes.append(equation)
    return [tuple(sorted(face)) for face in faces]


def identify_solid(n: int, faces: Sequence[Tuple[int, ...]]) -> Optional[str]:
    counts: Dict[int, int] = {}
    for face in faces:
        counts[len(face)] = counts.get(len(face), 0) + 1
    for name, (size, signature) in BREAKABLE_SOLIDS.items():
        if n == size and counts == signature:
            return name
    return None


def _selectable_faces(vertices: np.ndarray, eps: float) -> Tuple[str, List[Tuple[int, ...]]]:
    faces = polyhedron_faces(vertices, eps)
    name = identify_solid(len(vertices), faces)
    if name is None:
        raise FormationError(f"unbreakable orbit of {len(vertices)} points")
    if name == "icosidodecahedron":
        # Pentagons only: 12 of them cannot host a T adversary
        faces = [face for face in faces if len(face) == 5]
    return name, faces


def _face_destination(vertices: np.ndarray, face: Tuple[int, ...], p: np.ndarray, epsilon: float) -> np.ndarray:
    center = vertices[list(face)].mean(axis=0)
    return center + epsilon * (p - center) / np.linalg.norm(p - center)


def candidate_destinations(
    vertices: PointsLike, tol: Optional[Tolerance] = None, epsilon_ratio: Optional[float] = None
) -> List[np.ndarray]:
    """Per vertex, every point break_symmetry may send it to, in rank order."""
    tol = resolve_tolerance(tol)
    V = as_points(vertices)
    eps = tol.eps(float(np.max(np.linalg.norm(V - V.mean(axis=0), axis=1))))
    _, faces = _selectable_faces(V, eps)
    epsilon = _epsilon_ratio(epsilon_ratio) * min_pairwise_distance(V)
    result = []
    for i in range(len(V)):
        incident = [face for face in faces if i in face]
        centers = np.array([V[list(face)].mean(axis=0) for face in incident])
        order = lexicographic_order(centers, eps)
        result.append(np.array([_face_destination(V, incident[k], V[i], epsilon) for k in order]))
    return result


def _prepare(analysis: ConfigurationAnalysis, self: int) -> np.ndarray:
    if analysis.conditions.t1:
        raise FormationError("wrong phase: preparation needs a configuration violating T1")
    target = analysis.breakable_orbit()
    if target is None:
        raise UnsolvableConfigurationError("unsolvable input")
    p = analysis.points[self]
    if self not in analysis.decomposition.orbits[target]:
        return p.copy()
    b = analysis.center
    direction = (p - b) / np.linalg.norm(p - b)
    return b + direction * analysis.inner_radius / 2.0


def prepare(local_obs: PointsLike, self: int, tol: Optional[Tolerance] = None) -> np.ndarray:
    """Move the first orbit of size not in {12, 24, 60} halfway into the inner ball."""
    return _prepare(analyze_configuration(local_obs, tol), self)


def _turn_innermost(analysis: ConfigurationAnalysis, self: int) -> np.ndarray:
    p = analysis.points[self]
    if self not in analysis.decomposition.orbits[0]:
        return p.copy()
    return rotate_about(p[None, :], analysis.center, LOCAL_Z, SYMMETRIC_TURN)[0]


def _break_symmetry(
    analysis: ConfigurationAnalysis, self: int, choice: FaceChoice, epsilon_ratio: Optional[float]
) -> np.ndarray:
    conditions = analysis.conditions
    if not conditions.t1 or conditions.t2:
        raise FormationError(f"wrong phase: symmetry breaking needs T1 and not T2, phase is {conditions.phase}")
    orbit = analysis.decomposition.orbits[0]
    p = analysis.points[self]
    if self not in orbit:
        return p.copy()

    vertices = analysis.points[list(orbit)]
    name, faces = _selectable_faces(vertices, analysis.eps)
    local = orbit.index(self)
    incident = [face for face in faces if local in face]
    centers = np.array([vertices[list(face)].mean(axis=0) for face in incident])
    order = lexicographic_order(centers, analysis.eps)
    if choice.rank >= len(order):
        raise FormationError(f"face rank {choice.rank} out of range for {len(order)} incident faces")

    epsilon = _epsilon_ratio(epsilon_ratio) * min_pairwise_distance(vertices)
    logger.debug(f"Breaking {name} orbit toward face rank {choice.rank}")
    return _face_destination(vertices, incident[order[choice.rank]], p, epsilon)


def break_symmetry(
    local_obs: PointsLike,
    self: int,
    choice: FaceChoice = FaceChoice(),
    tol: Optional[Tolerance] = None,
    epsilon_ratio: Optional[float] = None,
) -> np.ndarray:
    """Move the innermost orbit's robots toward the centers of incident faces."""
    return _break_symmetry(analyze_configuration(local_obs, tol), self, choice, epsilon_ratio)


def _regular_edges(S: np.ndarray, tol: Tolerance) -> Tuple[float, List[List[int]], float]:
    n = len(S)
    if n not in REGULAR_DEGREES:
        raise FormationError(f"{n} points cannot form a regular polyhedron")
    ball = smallest_enclosing_ball(S, tol)
    if not np.all(ball.on_sphere(S, tol)):
        raise FormationError("points are not cospherical")
    edge = min_pairwise_distance(S)
    eps = tol.eps(ball.radius)
    pairs = cKDTree(S).query_pairs(edge + eps)
    neighbors: List[List[int]] = [[] for _ in range(n)]
    for i, j in pairs:
        neighbors[i].append(j)
        neighbors[j].append(i)
    if any(len(adjacent) != REGULAR_DEGREES[n] for adjacent in neighbors):
        raise FormationError("points are not the vertices of a regular polyhedron")
    return edge, neighbors, eps


def regular_polyhedron_edges(P: PointsLike, tol: Optional[Tolerance] = None) -> Tuple[float, List[List[int]]]:
    """Edge length and adjacency lists of a regular polyhedron's vertex set."""
    edge, neighbors, _ = _regular_edges(as_points(P), resolve_tolerance(tol))
    return edge, neighbors


def _midpoint_destination(
    S: np.ndarray,
    self: int,
    edge_choice: int,
    edges: Tuple[float, List[List[int]], float],
    epsilon_ratio: Optional[float],
) -> np.ndarray:
    edge, neighbors, eps = edges
    adjacent = neighbors[self]
    if not 0 <= edge_choice < len(adjacent):
        raise FormationError(f"edge choice {edge_choice} out of range for {len(adjacent)} incident edges")
    q = S[adjacent[lexicographic_order(S[adjacent], eps)[edge_choice]]]
    p = S[self]
    epsilon = _epsilon_ratio(epsilon_ratio) * edge
    return (p + q) / 2.0 + epsilon * (p - q) / np.linalg.norm(p - q)


def go_to_midpoint(
    local_obs: PointsLike,
    self: int,
    edge_choice: int = 0,
    tol: Optional[Tolerance] = None,
    epsilon_ratio: Optional[float] = None,
) -> np.ndarray:
    """Move epsilon short of the midpoint of an incident edge, on the own side."""
    tol = resolve_tolerance(tol)
    S = as_points(local_obs)
    return _midpoint_destination(S, self, edge_choice, _regular_edges(S, tol), epsilon_ratio)


def go_to_midpoint_step(
    local_obs: PointsLike,
    self: int,
    *,
    edge_choice: int = 0,
    guard: bool = False,
    tol: Optional[Tolerance] = None,
) -> np.ndarray:
    """go_to_midpoint on regular polyhedra, the plane formation step elsewhere."""
    tol = resolve_tolerance(tol)
    S = as_points(local_obs)
    try:
        edges = _regular_edges(S, tol)
    except FormationError:
        return plane_formation_step(S, self, guard=guard, tol=tol)
    return _midpoint_destination(S, self, edge_choice, edges, None)


def classify_midpoint_outcome(points: PointsLike, epsilon: float) -> str:
    """Outcome class of one go-to-midpoint step on a tetrahedron.

    A: two edges selected twice each, B: one edge selected twice,
    C: four distinct edges. Twice-selected edges leave a pair 2*epsilon apart.
    """
    S = as_points(points)
    if len(S) != 4:
        raise ValueError(f"outcome classes are defined for 4 robots, got {len(S)}")
    close = len(cKDTree(S).query_pairs(2.0 * epsilon * (1.0 + 1e-6)))
    outcomes = {2: "A", 1: "B", 0: "C"}
    if close not in outcomes:
        raise ValueError(f"{close} close pairs match no outcome class")
    return outcomes[close]


def plane_formation_step(
    local_obs: PointsLike,
    self: int,
    *,
    guard: bool = True,
    choice: FaceChoice = FaceChoice(),
    tol: Optional[Tolerance] = None,
    epsilon_ratio: Optional[float] = None,
) -> np.ndarray:
    """One robot's destination for one cycle of the plane formation algorithm."""
    analysis = analyze_configuration(local_obs, tol)
    p = analysis.points[self]
    conditions = analysis.conditions
    if conditions.t3:
        return p.copy()

    if analysis.center_index is not None:
        if analysis.center_index != self:
            return p.copy()
        rest = np.delete(analysis.points, self, axis=0)
        radius = innermost_empty_ball(rest, analysis.center, analysis.tol).radius
        return analysis.center + np.array([radius / 2.0, 0.0, 0.0])

    if analysis.unsolvable:
        if guard:
            raise UnsolvableConfigurationError("unsolvable input")
        return _turn_innermost(analysis, self)
    if not conditions.t1:
        return _prepare(analysis, self)
    if not conditions.t2:
        return _break_symmetry(analysis, self, choice, epsilon_ratio)
    return land_from_analysis(analysis, self)
