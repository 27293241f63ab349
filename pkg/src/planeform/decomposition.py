"""Orbit decomposition under gamma(P) and the local views that order it."""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from .errors import DecompositionError, GeometryError, SymmetryError
from .geometry import (
    PointsLike,
    RotationOp,
    Tolerance,
    as_points,
    compare_sequences,
    dedupe_points,
    has_multiplicity,
    innermost_empty_ball,
    is_coplanar,
    resolve_tolerance,
    smallest_enclosing_ball,
)
from .symmetry import GroupClass, GroupKind, rotation_group

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True, eq=False)
class LocalView:
    """Sequence of (altitude, longitude, latitude) triples seen from one robot.

    Row 0 is the observer, row 1 its meridian robot, the rest sorted.
    ``order`` holds the point index behind each row.
    """

    observer: int
    meridian: int
    triples: np.ndarray
    order: Tuple[int, ...]

    def compare(self, other: LocalView, atol: float) -> int:
        return compare_sequences(self.triples, other.triples, atol)

    def relabeled(self, index: np.ndarray) -> LocalView:
        """The same view with point j renamed index[j]."""
        return LocalView(
            int(index[self.observer]),
            int(index[self.meridian]),
            self.triples,
            tuple(int(index[j]) for j in self.order),
        )

    def __len__(self) -> int:
        return len(self.triples)


@dataclass(frozen=True, eq=False)
class ViewGeometry:
    """Quantities shared by every local view of one configuration."""

    X: np.ndarray
    radii: np.ndarray
    inner: float
    outer: float
    altitudes: np.ndarray
    eps: float
    atol: float


def view_geometry(
    P: PointsLike, tol: Optional[Tolerance] = None, center: Optional[Sequence[float]] = None
) -> ViewGeometry:
    tol = resolve_tolerance(tol)
    S = as_points(P)
    b = np.asarray(center, dtype=float) if center is not None else smallest_enclosing_ball(S, tol).center
    X = S - b
    radii = np.linalg.norm(X, axis=1)
    outer = float(radii.max())
    eps = tol.eps(outer)
    if is_coplanar(S, tol, scale=outer):
        raise DecompositionError("local view undefined on plane")
    inner = innermost_empty_ball(S, b, tol).radius
    spread = outer - inner
    if spread <= eps:
        altitudes = np.ones(len(S))
    else:
        altitudes = np.clip((radii - inner) / spread, 0.0, 1.0)
    return ViewGeometry(X, radii, inner, outer, altitudes, eps, tol.angular)


def _view_from(geometry: ViewGeometry, i: int) -> LocalView:
    X = geometry.X
    n = len(X)
    atol = geometry.atol
    u = X[i] / geometry.radii[i]
    height = X @ u
    perp = X - np.outer(height, u)
    perp_norm = np.linalg.norm(perp, axis=1)
    off_axis = perp_norm > geometry.eps
    off_axis[i] = False

    latitude = np.arctan2(perp_norm, height)
    latitude[~off_axis & (height >= 0)] = 0.0
    latitude[~off_axis & (height < 0)] = math.pi
    altitude = geometry.altitudes

    candidates = np.flatnonzero(off_axis)
    if len(candidates) == 0:
        raise DecompositionError("local view undefined on plane")
    # The meridian row is (h, 0, phi), so only minimal (h, phi) candidates can win
    pairs = np.column_stack([altitude[candidates], latitude[candidates]])
    best_pair = min(pairs, key=functools.cmp_to_key(lambda p, q: compare_sequences(p, q, atol)))
    shortlist = [
        int(m) for m, pair in zip(candidates, pairs) if compare_sequences(pair, best_pair, atol) == 0
    ]

    best: Optional[LocalView] = None
    for m in shortlist:
        e = perp[m] / perp_norm[m]
        w = np.cross(u, e)
        longitude = np.mod(np.arctan2(X @ w, X @ e), TWO_PI)
        longitude[longitude >= TWO_PI - atol] = 0.0
        longitude[~off_axis] = 0.0
        longitude[m] = 0.0
        triples = np.column_stack([altitude, longitude, latitude])

        rest = [j for j in range(n) if j != i and j != m]
        rest.sort(key=functools.cmp_to_key(lambda p, q: compare_sequences(triples[p], triples[q], atol)))
        order = (i, m, *rest)
        view = LocalView(i, m, triples[list(order)], order)
        if best is None or view.compare(best, atol) < 0:
            best = view
    return best


def local_view(
    P: PointsLike, i: int, tol: Optional[Tolerance] = None, center: Optional[Sequence[float]] = None
) -> LocalView:
    """Local view of robot i: its own triple, its meridian robot, then the rest."""
    geometry = view_geometry(P, tol, center)
    if not 0 <= i < len(geometry.X):
        raise IndexError(f"observer index {i} out of range")
    return _view_from(geometry, i)


@dataclass(frozen=True, eq=False)
class OrbitDecomposition:
    """Transitive orbits of gamma(P), in the order every robot agrees on.

    ``ordered`` is False when local views are undefined (coplanar input or a
    robot at b(P)); orbits are then sorted by radius only.
    """

    orbits: Tuple[Tuple[int, ...], ...]
    foldings: Tuple[Optional[int], ...]
    group: GroupClass
    views: Optional[Tuple[LocalView, ...]]
    ordered: bool
    center: np.ndarray

    @property
    def sizes(self) -> Tuple[int, ...]:
        return tuple(len(orbit) for orbit in self.orbits)

    def index_of(self, point_index: int) -> int:
        for k, orbit in enumerate(self.orbits):
            if point_index in orbit:
                return k
        raise IndexError(f"point {point_index} belongs to no orbit")

    def points(self, P: PointsLike, k: int) -> np.ndarray:
        return as_points(P)[list(self.orbits[k])]

    def relabeled(
        self, index: np.ndarray, group: GroupClass, center: np.ndarray, radii: np.ndarray, eps: float
    ) -> OrbitDecomposition:
        """The decomposition after renaming point j to index[j] and moving to another frame.

        View order is frame independent; the radius fallback is re-sorted
        because it breaks ties by index.
        """
        orbits = [tuple(sorted(int(index[j]) for j in orbit)) for orbit in self.orbits]
        order = list(range(len(orbits))) if self.ordered else _radius_order(orbits, radii, eps)
        views = None if self.views is None else tuple(self.views[k].relabeled(index) for k in order)
        return OrbitDecomposition(
            orbits=tuple(orbits[k] for k in order),
            foldings=tuple(self.foldings[k] for k in order),
            group=group,
            views=views,
            ordered=self.ordered,
            center=center,
        )


def _radius_order(orbits: Sequence[Tuple[int, ...]], radii: np.ndarray, eps: float) -> List[int]:
    def by_radius(p: int, q: int) -> int:
        return compare_sequences(
            [radii[orbits[p][0]], orbits[p][0]], [radii[orbits[q][0]], orbits[q][0]], eps
        )

    return sorted(range(len(orbits)), key=functools.cmp_to_key(by_radius))


def _collinear_orbits(X: np.ndarray, eps: float) -> List[Tuple[int, ...]]:
    # Half-turns about perpendicular axes swap p and -p; rotations about the line fix both
    tree = cKDTree(X)
    seen = set()
    orbits = []
    for i in range(len(X)):
        if i in seen:
            continue
        dist, j = tree.query(-X[i])
        members = {i, int(j)} if dist <= eps else {i}
        seen |= members
        orbits.append(tuple(sorted(members)))
    return orbits


def _group_orbits(X: np.ndarray, rotations: Sequence[RotationOp], eps: float):
    mats = np.stack([op.matrix for op in rotations])
    tree = cKDTree(X)
    assigned = np.full(len(X), False)
    orbits, foldings = [], []
    for i in range(len(X)):
        if assigned[i]:
            continue
        images = np.einsum("gab,b->ga", mats, X[i])
        dist, idx = tree.query(images)
        if np.any(dist > eps):
            raise SymmetryError("orbit leaves the point set")
        members = tuple(sorted(set(int(j) for j in idx)))
        assigned[list(members)] = True
        orbits.append(members)
        foldings.append(int(np.sum(np.linalg.norm(images - X[i], axis=1) <= eps)))
    return orbits, foldings


def orbits_under(
    P: PointsLike,
    rotations: Sequence[RotationOp],
    tol: Optional[Tolerance] = None,
    center: Optional[Sequence[float]] = None,
) -> Tuple[List[Tuple[int, ...]], List[int]]:
    """Orbits and foldings of P under any finite rotation group about center."""
    tol = resolve_tolerance(tol)
    S = as_points(P)
    b = np.asarray(center, dtype=float) if center is not None else smallest_enclosing_ball(S, tol).center
    X = S - b
    return _group_orbits(X, rotations, tol.eps(float(np.linalg.norm(X, axis=1).max())))


def gamma_decomposition(
    P: PointsLike,
    tol: Optional[Tolerance] = None,
    group: Optional[GroupClass] = None,
    center: Optional[Sequence[float]] = None,
) -> OrbitDecomposition:
    """Orbits of gamma(P) with foldings, sorted by representative local view."""
    tol = resolve_tolerance(tol)
    S = as_points(P)
    if len(S) == 0:
        raise GeometryError("empty point set")
    b = np.asarray(center, dtype=float) if center is not None else smallest_enclosing_ball(S, tol).center
    X = S - b
    radii = np.linalg.norm(X, axis=1)
    eps = tol.eps(float(radii.max()))
    if has_multiplicity(S, eps):
        raise GeometryError("multiplicity")
    if group is None:
        group = rotation_group(S, tol, center=b)

    if group.kind is GroupKind.COLLINEAR:
        orbits = _collinear_orbits(X, eps)
        foldings: List[Optional[int]] = [None] * len(orbits)
    else:
        orbits, foldings = _group_orbits(X, group.rotations, eps)

    coplanar = is_coplanar(S, tol, scale=float(radii.max()))
    occupied = bool(radii.min() <= eps)
    if coplanar or occupied:
        order = _radius_order(orbits, radii, eps)
        logger.debug("Orbit order falls back to radius (views undefined)")
        return OrbitDecomposition(
            orbits=tuple(orbits[k] for k in order),
            foldings=tuple(foldings[k] for k in order),
            group=group,
            views=None,
            ordered=False,
            center=b,
        )

    geometry = view_geometry(S, tol, b)
    views = [_view_from(geometry, orbit[0]) for orbit in orbits]
    order = sorted(
        range(len(orbits)),
        key=functools.cmp_to_key(lambda p, q: views[p].compare(views[q], tol.angular)),
    )
    return OrbitDecomposition(
        orbits=tuple(orbits[k] for k in order),
        foldings=tuple(foldings[k] for k in order),
        group=group,
        views=tuple(views[k] for k in order),
        ordered=True,
        center=b,
    )


def orbit_of(
    seed: Sequence[float], rotations: Sequence, tol: Optional[Tolerance] = None
) -> np.ndarray:
    """Deduplicated images of seed under a rotation group (RotationOps or matrices)."""
    tol = resolve_tolerance(tol)
    s = np.asarray(seed, dtype=float)
    mats = np.stack([op.matrix if isinstance(op, RotationOp) else np.asarray(op, dtype=float) for op in rotations])
    images = np.einsum("gab,b->ga", mats, s)
    return dedupe_points(images, tol.eps(float(np.linalg.norm(s))))


def folding(seed: Sequence[float], rotations: Sequence[RotationOp], tol: Optional[Tolerance] = None) -> int:
    """Number of group elements fixing seed."""
    tol = resolve_tolerance(tol)
    s = np.asarray(seed, dtype=float)
    eps = tol.eps(float(np.linalg.norm(s)))
    return sum(1 for op in rotations if float(np.linalg.norm(op.matrix @ s - s)) <= eps)
