"""Euclidean primitives: balls, planes, rotations and tolerance-aware predicates."""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.transform import Rotation

from .config import SETTINGS
from .errors import GeometryError

logger = logging.getLogger(__name__)

# Largest rotation order recognised when snapping angles to 2*pi*j/k.
MAX_SNAP_ORDER = 60

PointsLike = Union[np.ndarray, Sequence["Point3"], Sequence[Sequence[float]]]


@dataclass(frozen=True)
class Tolerance:
    """Relative and absolute slack threaded through every geometric predicate."""

    relative: float = 1e-9
    absolute: float = 1e-12
    angular: float = 1e-7

    def __post_init__(self):
        for name in ("relative", "absolute", "angular"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise GeometryError(f"tolerance {name} must be strictly positive, got {value!r}")

    @classmethod
    def default(cls) -> Tolerance:
        return cls(
            relative=SETTINGS.tolerance_relative,
            absolute=SETTINGS.tolerance_absolute,
            angular=SETTINGS.tolerance_angular,
        )

    def eps(self, scale: float) -> float:
        """Distance slack for a configuration of the given size."""
        return max(self.relative * abs(float(scale)), self.absolute)

    @property
    def matrix(self) -> float:
        """Frobenius slack for orthonormality checks of normalized maps."""
        return math.sqrt(self.relative)


def resolve_tolerance(tol: Optional[Tolerance]) -> Tolerance:
    return tol if tol is not None else Tolerance.default()


@dataclass(frozen=True)
class Point3:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(math.isfinite(c) for c in (self.x, self.y, self.z)):
            raise GeometryError(f"non-finite coordinate in {self!r}")

    @classmethod
    def from_array(cls, values: Iterable[float]) -> Point3:
        x, y, z = (float(v) for v in values)
        return cls(x, y, z)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    def __iter__(self):
        return iter((self.x, self.y, self.z))


def as_points(points: PointsLike) -> np.ndarray:
    """Coerce a point collection into a finite float array of shape (n, 3)."""
    if isinstance(points, np.ndarray):
        arr = np.asarray(points, dtype=float)
    else:
        arr = np.array(
            [p.as_array() if isinstance(p, Point3) else p for p in points], dtype=float
        )
    if arr.size == 0:
        return arr.reshape(0, 3)
    if arr.ndim == 1 and arr.shape[0] == 3:
        arr = arr.reshape(1, 3)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise GeometryError(f"points must have shape (n, 3), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise GeometryError("non-finite coordinate in point set")
    return arr


@dataclass(frozen=True, eq=False)
class Ball:
    center: np.ndarray
    radius: float
    support: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.radius < 0:
            raise GeometryError(f"ball radius must be nonnegative, got {self.radius}")

    def contains(self, points: PointsLike, tol: Optional[Tolerance] = None) -> np.ndarray:
        tol = resolve_tolerance(tol)
        dist = np.linalg.norm(as_points(points) - self.center, axis=1)
        return dist <= self.radius + tol.eps(self.radius)

    def on_sphere(self, points: PointsLike, tol: Optional[Tolerance] = None) -> np.ndarray:
        tol = resolve_tolerance(tol)
        dist = np.linalg.norm(as_points(points) - self.center, axis=1)
        return np.abs(dist - self.radius) <= tol.eps(self.radius)


@dataclass(frozen=True, eq=False)
class Plane:
    normal: np.ndarray
    offset: float

    def __post_init__(self):
        if abs(float(np.linalg.norm(self.normal)) - 1.0) > 1e-9:
            raise GeometryError("plane normal must have unit length")

    @classmethod
    def through(cls, point: Sequence[float], normal: Sequence[float]) -> Plane:
        n = np.asarray(normal, dtype=float)
        length = float(np.linalg.norm(n))
        if length == 0.0:
            raise GeometryError("plane normal must be nonzero")
        n = n / length
        return cls(n, float(np.dot(n, np.asarray(point, dtype=float))))

    @property
    def origin(self) -> np.ndarray:
        return self.normal * self.offset

    def signed_distance(self, points: PointsLike) -> np.ndarray:
        return as_points(points) @ self.normal - self.offset

    def project(self, points: PointsLike) -> np.ndarray:
        pts = as_points(points)
        return pts - np.outer(self.signed_distance(pts), self.normal)

    def contains(self, points: PointsLike, eps: float) -> np.ndarray:
        return np.abs(self.signed_distance(points)) <= eps


def canonical_axis(direction: Sequence[float], atol: float = 1e-9) -> np.ndarray:
    """Unit direction whose leading nonzero coordinate is positive."""
    u = np.asarray(direction, dtype=float)
    length = float(np.linalg.norm(u))
    if length == 0.0:
        raise GeometryError("axis direction must be nonzero")
    u = u / length
    for c in u:
        if abs(c) > atol:
            return u if c > 0 else -u
    return u


def snap_order(angle: float, tol: Optional[Tolerance] = None) -> Optional[int]:
    """Smallest k <= MAX_SNAP_ORDER with angle within tolerance of 2*pi*j/k."""
    tol = resolve_tolerance(tol)
    turns = angle / (2.0 * math.pi)
    for k in range(1, MAX_SNAP_ORDER + 1):
        if abs(turns * k - round(turns * k)) * 2.0 * math.pi <= tol.angular * k:
            return k
    return None


@dataclass(frozen=True, eq=False)
class RotationOp:
    """A proper rotation about the origin with its canonical axis and order."""

    matrix: np.ndarray
    axis: np.ndarray
    angle: float
    order: Optional[int]

    @classmethod
    def from_matrix(cls, matrix: np.ndarray, tol: Optional[Tolerance] = None) -> RotationOp:
        tol = resolve_tolerance(tol)
        m = np.asarray(matrix, dtype=float)
        rotvec = Rotation.from_matrix(m).as_rotvec()
        theta = float(np.linalg.norm(rotvec))
        if theta <= tol.angular:
            return cls(m, np.array([0.0, 0.0, 1.0]), 0.0, 1)
        direction = rotvec / theta
        axis = canonical_axis(direction)
        if float(np.dot(axis, direction)) < 0:
            theta = 2.0 * math.pi - theta
        return cls(m, axis, theta, snap_order(theta, tol))

    @classmethod
    def about(cls, axis: Sequence[float], angle: float, tol: Optional[Tolerance] = None) -> RotationOp:
        u = np.asarray(axis, dtype=float)
        u = u / np.linalg.norm(u)
        return cls.from_matrix(Rotation.from_rotvec(u * angle).as_matrix(), tol)

    def conjugated(self, rotation: np.ndarray) -> RotationOp:
        """The same rotation written in coordinates y = rotation.T @ x."""
        R = np.asarray(rotation, dtype=float)
        if self.is_identity:
            return RotationOp(R.T @ self.matrix @ R, self.axis, 0.0, 1)
        turned = R.T @ self.axis
        axis = canonical_axis(turned)
        angle = self.angle if float(np.dot(axis, turned)) > 0 else 2.0 * math.pi - self.angle
        return RotationOp(R.T @ self.matrix @ R, axis, angle, self.order)

    @property
    def is_identity(self) -> bool:
        return self.order == 1

    def apply(self, points: PointsLike) -> np.ndarray:
        return as_points(points) @ self.matrix.T

    def __repr__(self) -> str:
        return (
            f"RotationOp(order={self.order}, axis={np.round(self.axis, 6).tolist()}, "
            f"angle={self.angle:.6f})"
        )


def rotation_from_vector_pairs(
    a: Sequence[float],
    b: Sequence[float],
    a2: Sequence[float],
    b2: Sequence[float],
    tol: Optional[Tolerance] = None,
) -> Optional[RotationOp]:
    """The rotation sending a->a2 and b->b2, or None if no proper rotation does."""
    tol = resolve_tolerance(tol)
    a, b, a2, b2 = (np.asarray(v, dtype=float) for v in (a, b, a2, b2))
    ab = np.cross(a, b)
    ab2 = np.cross(a2, b2)
    for u, v, w in ((a, b, ab), (a2, b2, ab2)):
        scale = float(np.linalg.norm(u) * np.linalg.norm(v))
        if scale == 0.0 or float(np.linalg.norm(w)) <= tol.eps(scale):
            raise GeometryError("collinear basis")

    source = np.column_stack([a, b, ab])
    target = np.column_stack([a2, b2, ab2])
    linear = np.linalg.solve(source.T, target.T).T

    if np.linalg.norm(linear.T @ linear - np.eye(3)) > tol.matrix:
        return None
    if abs(np.linalg.det(linear) - 1.0) > tol.matrix:
        return None

    # Snap to the nearest orthonormal matrix
    u, _, vt = np.linalg.svd(linear)
    snapped = u @ vt
    if np.linalg.det(snapped) < 0:
        return None
    return RotationOp.from_matrix(snapped, tol)


def rotate_about(
    points: PointsLike, center: Sequence[float], direction: Sequence[float], angle: float
) -> np.ndarray:
    """Rotate points by angle (right-hand rule) about the line center + t*direction."""
    u = np.asarray(direction, dtype=float)
    u = u / np.linalg.norm(u)
    c = np.asarray(center, dtype=float)
    return Rotation.from_rotvec(u * angle).apply(as_points(points) - c) + c


class _WelzlNode:
    __slots__ = ("points", "support", "ball", "pivot", "left", "right")

    def __init__(self, points: List[int], support: List[int]):
        self.points = points
        self.support = support
        self.ball: Optional[Tuple[np.ndarray, float, Tuple[int, ...]]] = None
        self.pivot: Optional[int] = None
        self.left: Optional[_WelzlNode] = None
        self.right: Optional[_WelzlNode] = None


def _circumsphere(S: np.ndarray) -> Tuple[np.ndarray, float]:
    """Center and squared radius of the smallest sphere through all rows of S."""
    if len(S) == 1:
        return S[0].copy(), 0.0
    U = S[1:] - S[0]
    B = np.sum(U ** 2, axis=1) / 2.0
    # lstsq tolerates cospherical supports that are affinely dependent
    coef = np.linalg.lstsq(U @ U.T, B, rcond=None)[0]
    C = coef @ U
    return C + S[0], float(np.sum(C ** 2))


def _boundary(S: np.ndarray, support: List[int]) -> Tuple[np.ndarray, float, Tuple[int, ...]]:
    if not support:
        return np.zeros(3), -1.0, ()
    center, r2 = _circumsphere(S[support])
    return center, r2, tuple(support)


def _inside(ball, p: np.ndarray, slack: float) -> bool:
    center, r2, _ = ball
    if r2 < 0:
        return False
    return math.sqrt(float(np.sum((p - center) ** 2))) <= math.sqrt(r2) + slack


def smallest_enclosing_ball(
    points: PointsLike,
    tol: Optional[Tolerance] = None,
    rng: Optional[np.random.Generator] = None,
) -> Ball:
    """Smallest ball containing every point (randomized Welzl, iterative)."""
    tol = resolve_tolerance(tol)
    S = as_points(points)
    if len(S) == 0:
        raise GeometryError("empty point set")
    rng = rng if rng is not None else np.random.default_rng(0)

    spread = float(np.max(np.linalg.norm(S - S[0], axis=1)))
    slack = tol.eps(spread)

    root = _WelzlNode(list(range(len(S))), [])
    stack = [root]
    while stack:
        node = stack.pop()
        if not node.points or len(node.support) >= 4:
            node.ball = _boundary(S, node.support)
        elif node.left is None:
            node.pivot = int(node.points[int(rng.integers(len(node.points)))])
            node.left = _WelzlNode([i for i in node.points if i != node.pivot], node.support)
            stack.extend((node, node.left))
        elif node.right is None:
            if _inside(node.left.ball, S[node.pivot], slack):
                node.ball = node.left.ball
            else:
                node.right = _WelzlNode(node.left.points, node.support + [node.pivot])
                stack.extend((node, node.right))
        else:
            node.ball = node.right.ball
            node.left = node.right = None

    center, _, support = root.ball
    radius = float(np.max(np.linalg.norm(S - center, axis=1)))
    return Ball(center, radius, support)


def innermost_empty_ball(
    points: PointsLike, center: Sequence[float], tol: Optional[Tolerance] = None
) -> Ball:
    """Largest ball around center with no point of the set in its interior."""
    tol = resolve_tolerance(tol)
    S = as_points(points)
    if len(S) == 0:
        raise GeometryError("empty point set")
    c = np.asarray(center, dtype=float)
    dist = np.linalg.norm(S - c, axis=1)
    if float(dist.min()) <= tol.eps(float(dist.max())):
        raise GeometryError("center occupied")
    return Ball(c, float(dist.min()))


def dedupe_points(points: PointsLike, eps: float) -> np.ndarray:
    """Merge points closer than eps, keeping the first of each cluster."""
    S = as_points(points)
    if len(S) <= 1:
        return S.copy()
    tree = cKDTree(S)
    seen = np.zeros(len(S), dtype=bool)
    keep = []
    for i in range(len(S)):
        if seen[i]:
            continue
        keep.append(i)
        seen[tree.query_ball_point(S[i], eps)] = True
    return S[keep]


def has_multiplicity(points: PointsLike, eps: float) -> bool:
    S = as_points(points)
    if len(S) <= 1:
        return False
    return len(cKDTree(S).query_pairs(eps)) > 0


def min_pairwise_distance(points: PointsLike) -> float:
    S = as_points(points)
    if len(S) <= 1:
        return math.inf
    dist, _ = cKDTree(S).query(S, k=2)
    return float(dist[:, 1].min())


def best_fit_plane(points: PointsLike) -> Tuple[Plane, float]:
    """Least-squares plane through the points and the largest deviation from it."""
    S = as_points(points)
    centroid = S.mean(axis=0)
    X = S - centroid
    if len(S) < 3 or not np.any(X):
        return Plane.through(centroid, [0.0, 0.0, 1.0]), 0.0
    _, _, vt = np.linalg.svd(X)
    plane = Plane.through(centroid, vt[-1])
    return plane, float(np.max(np.abs(plane.signed_distance(S))))


def is_coplanar(points: PointsLike, tol: Optional[Tolerance] = None, scale: Optional[float] = None) -> bool:
    tol = resolve_tolerance(tol)
    S = as_points(points)
    if len(S) <= 3:
        return True
    if scale is None:
        scale = smallest_enclosing_ball(S, tol).radius
    _, deviation = best_fit_plane(S)
    return deviation <= tol.eps(scale)


def line_deviation(points: PointsLike) -> float:
    """Largest distance from the points to their least-squares line."""
    S = as_points(points)
    if len(S) <= 2:
        return 0.0
    X = S - S.mean(axis=0)
    if not np.any(X):
        return 0.0
    _, _, vt = np.linalg.svd(X)
    residual = X - np.outer(X @ vt[0], vt[0])
    return float(np.max(np.linalg.norm(residual, axis=1)))


def is_collinear(points: PointsLike, tol: Optional[Tolerance] = None, scale: Optional[float] = None) -> bool:
    tol = resolve_tolerance(tol)
    S = as_points(points)
    if len(S) <= 2:
        return True
    if scale is None:
        scale = smallest_enclosing_ball(S, tol).radius
    return line_deviation(S) <= tol.eps(scale)


def compare_sequences(a: np.ndarray, b: np.ndarray, atol: float) -> int:
    """Lexicographic comparison treating entries within atol as equal."""
    for x, y in zip(np.ravel(a), np.ravel(b)):
        if abs(x - y) > atol:
            return -1 if x < y else 1
    return (len(np.ravel(a)) > len(np.ravel(b))) - (len(np.ravel(a)) < len(np.ravel(b)))


def lexicographic_order(rows: np.ndarray, atol: float) -> List[int]:
    """Indices sorting rows lexicographically under the tolerant comparison."""
    rows = np.asarray(rows, dtype=float)
    key = functools.cmp_to_key(lambda i, j: compare_sequences(rows[i], rows[j], atol))
    return sorted(range(len(rows)), key=key)


def quantize(values: np.ndarray, step: float) -> np.ndarray:
    return np.rint(np.asarray(values, dtype=float) / step).astype(np.int64)
