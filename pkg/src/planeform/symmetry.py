"""Rotation groups of finite point sets: enumeration, classification, subgroups."""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.transform import Rotation

from .errors import GeometryError, SymmetryError
from .geometry import (
    PointsLike,
    RotationOp,
    Tolerance,
    as_points,
    canonical_axis,
    quantize,
    resolve_tolerance,
    rotation_from_vector_pairs,
    smallest_enclosing_ball,
)

logger = logging.getLogger(__name__)


class GroupKind(str, Enum):
    CYCLIC = "cyclic"
    DIHEDRAL = "dihedral"
    TETRAHEDRAL = "tetrahedral"
    OCTAHEDRAL = "octahedral"
    ICOSAHEDRAL = "icosahedral"
    COLLINEAR = "collinear"

    @property
    def symbol(self) -> str:
        return _SYMBOLS[self]

    @classmethod
    def from_symbol(cls, symbol: str) -> GroupKind:
        for kind, value in _SYMBOLS.items():
            if value.lower() == symbol.strip().lower() or kind.value == symbol.strip().lower():
                return kind
        raise ValueError(f"unknown group symbol: {symbol!r}")


_SYMBOLS = {
    GroupKind.CYCLIC: "C",
    GroupKind.DIHEDRAL: "D",
    GroupKind.TETRAHEDRAL: "T",
    GroupKind.OCTAHEDRAL: "O",
    GroupKind.ICOSAHEDRAL: "I",
    GroupKind.COLLINEAR: "Collinear",
}

POLYHEDRAL_KINDS = (GroupKind.TETRAHEDRAL, GroupKind.OCTAHEDRAL, GroupKind.ICOSAHEDRAL)

POLYHEDRAL_ORDERS: Dict[GroupKind, int] = {
    GroupKind.TETRAHEDRAL: 12,
    GroupKind.OCTAHEDRAL: 24,
    GroupKind.ICOSAHEDRAL: 60,
}

# Number of axes of each fold
AXIS_SIGNATURES: Dict[GroupKind, Dict[int, int]] = {
    GroupKind.TETRAHEDRAL: {3: 4, 2: 3},
    GroupKind.OCTAHEDRAL: {4: 3, 3: 4, 2: 6},
    GroupKind.ICOSAHEDRAL: {5: 6, 3: 10, 2: 15},
}

# Number of elements of each order
ORDER_PROFILES: Dict[GroupKind, Dict[int, int]] = {
    GroupKind.TETRAHEDRAL: {1: 1, 2: 3, 3: 8},
    GroupKind.OCTAHEDRAL: {1: 1, 2: 9, 3: 8, 4: 6},
    GroupKind.ICOSAHEDRAL: {1: 1, 2: 15, 3: 20, 5: 24},
}

_AXIS_ATOL = 1e-8
_MATRIX_ATOL = 1e-6


@dataclass(frozen=True, eq=False)
class Axis:
    direction: np.ndarray
    fold: int


@dataclass(frozen=True, eq=False)
class GroupClass:
    """Classification of a rotation group: C_k, D_l, T, O, I or Collinear."""

    kind: GroupKind
    k: Optional[int] = None
    axes: Tuple[Axis, ...] = ()
    principal: Optional[np.ndarray] = None
    rotations: Tuple[RotationOp, ...] = ()

    @property
    def order(self) -> Optional[int]:
        if self.kind is GroupKind.COLLINEAR:
            return None
        return len(self.rotations)

    @property
    def is_3d(self) -> bool:
        return self.kind in POLYHEDRAL_KINDS

    @property
    def is_2d(self) -> bool:
        return not self.is_3d

    @property
    def label(self) -> str:
        if self.kind in (GroupKind.CYCLIC, GroupKind.DIHEDRAL):
            return f"{self.kind.symbol}{self.k}"
        return self.kind.symbol

    def axes_with_fold(self, fold: int) -> List[np.ndarray]:
        return [axis.direction for axis in self.axes if axis.fold == fold]

    def conjugated(self, rotation: np.ndarray) -> GroupClass:
        """This group written in coordinates y = rotation.T @ x."""
        R = np.asarray(rotation, dtype=float)
        rotations = sorted((op.conjugated(R) for op in self.rotations), key=_sort_key)
        axes = sorted((Axis(canonical_axis(R.T @ ax.direction), ax.fold) for ax in self.axes), key=_axis_key)
        principal = None if self.principal is None else canonical_axis(R.T @ self.principal)
        return GroupClass(self.kind, self.k, tuple(axes), principal, tuple(rotations))

    def __str__(self) -> str:
        return self.label

    def __repr__(self) -> str:
        return f"GroupClass({self.label}, order={self.order})"


def _sort_key(op: RotationOp):
    return (op.order or 0, tuple(np.round(op.axis, 9)), round(op.angle, 9))


def _axis_key(axis: Axis):
    return (-axis.fold, tuple(np.round(axis.direction, 9)))


def _collinear_direction(X: np.ndarray, eps: float) -> Optional[np.ndarray]:
    """Direction of the line through the origin holding every row of X, if any."""
    radii = np.linalg.norm(X, axis=1)
    if radii.max() <= eps:
        return np.array([0.0, 0.0, 1.0])
    u = X[int(np.argmax(radii))] / radii.max()
    if float(np.max(np.linalg.norm(np.cross(X, u), axis=1))) <= eps:
        return canonical_axis(u)
    return None


def _radius_shells(radii: np.ndarray, eps: float) -> np.ndarray:
    shell = np.empty(len(radii), dtype=int)
    current = -1
    last = None
    for i in np.argsort(radii, kind="stable"):
        if last is None or radii[i] - last > eps:
            current += 1
        last = radii[i]
        shell[i] = current
    return shell


def enumerate_rotations(
    P: PointsLike, tol: Optional[Tolerance] = None, center: Optional[Sequence[float]] = None
) -> List[RotationOp]:
    """Every rotation about b(P) that permutes P, identity first."""
    tol = resolve_tolerance(tol)
    S = as_points(P)
    if len(S) < 2:
        raise SymmetryError("infinite rotation group (collinear)")
    b = np.asarray(center, dtype=float) if center is not None else smallest_enclosing_ball(S, tol).center
    X = S - b
    radii = np.linalg.norm(X, axis=1)
    eps = tol.eps(float(radii.max()))
    if _collinear_direction(X, eps) is not None:
        raise SymmetryError("infinite rotation group (collinear)")

    shells = _radius_shells(radii, eps)
    shell_sizes = np.bincount(shells)
    off_center = np.flatnonzero(radii > eps)

    base = min(off_center, key=lambda i: (shell_sizes[shells[i]], i))
    unit = X[base] / radii[base]
    sines = np.zeros(len(S))
    sines[off_center] = np.linalg.norm(np.cross(unit, X[off_center]), axis=1) / radii[off_center]
    sines[base] = 0.0
    threshold = 0.1 if sines.max() >= 0.1 else 0.5 * sines.max()
    second = min(
        np.flatnonzero(sines >= threshold),
        key=lambda j: (shell_sizes[shells[j]], -round(float(sines[j]), 9), j),
    )

    base_images = np.flatnonzero(shells == shells[base])
    second_shell = np.flatnonzero(shells == shells[second])
    base_distance = float(np.linalg.norm(X[base] - X[second]))

    tree = cKDTree(X)
    coarse = max(eps, tol.matrix * float(radii.max()))
    rotations: List[RotationOp] = []
    candidates = 0
    for a2 in base_images:
        distances = np.linalg.norm(X[second_shell] - X[a2], axis=1)
        for b2 in second_shell[np.abs(distances - base_distance) <= eps]:
            if b2 == a2:
                continue
            candidates += 1
            try:
                op = rotation_from_vector_pairs(X[base], X[second], X[a2], X[b2], tol)
            except GeometryError:
                continue
            if op is None:
                continue
            dist, image = tree.query(op.apply(X))
            if np.any(dist > coarse) or len(np.unique(image)) != len(image):
                continue
            fitted = _fit_rotation(X, image, eps, tol)
            if fitted is not None:
                rotations.append(fitted)

    rotations.sort(key=_sort_key)
    logger.debug(f"Enumerated {len(rotations)} rotations from {candidates} candidate pairs")
    return _close_under_composition(rotations, tol)


def _fit_rotation(X: np.ndarray, image: np.ndarray, eps: float, tol: Tolerance) -> Optional[RotationOp]:
    """Least-squares rotation sending every row of X onto X[image], if it fits within eps."""
    fit, _ = Rotation.align_vectors(X[image], X)
    matrix = fit.as_matrix()
    if float(np.max(np.linalg.norm(X @ matrix.T - X[image], axis=1))) > eps:
        return None
    op = RotationOp.from_matrix(matrix, tol)
    return op if op.order is not None else None


def _close_under_composition(rotations: List[RotationOp], tol: Tolerance) -> List[RotationOp]:
    try:
        multiplication_table(rotations)
    except SymmetryError:
        closed = generate_group([op.matrix for op in rotations], tol, atol=_MATRIX_ATOL)
        logger.debug(f"Closed {len(rotations)} verified rotations to {len(closed)} under composition")
        return closed
    return rotations


def multiplication_table(rotations: Sequence[RotationOp]) -> np.ndarray:
    """table[i, j] is the index of rotations[i] @ rotations[j]."""
    mats = np.stack([op.matrix for op in rotations])
    count = len(mats)
    products = np.einsum("iab,jbc->ijac", mats, mats).reshape(count * count, 9)
    dist, idx = cKDTree(mats.reshape(count, 9)).query(products)
    if np.any(dist > _MATRIX_ATOL):
        raise SymmetryError("rotation set is not closed under composition")
    return idx.reshape(count, count)


def _collect_axes(rotations: Sequence[RotationOp]) -> List[Axis]:
    directions: List[np.ndarray] = []
    folds: List[int] = []
    for op in rotations:
        if op.is_identity:
            continue
        for pos, direction in enumerate(directions):
            if abs(float(np.dot(direction, op.axis))) >= 1.0 - _AXIS_ATOL:
                folds[pos] = max(folds[pos], op.order)
                break
        else:
            directions.append(op.axis)
            folds.append(op.order)
    axes = [Axis(d, f) for d, f in zip(directions, folds)]
    axes.sort(key=_axis_key)
    return axes


def classify_rotation_group(
    rotations: Iterable[RotationOp],
    points: Optional[PointsLike] = None,
    tol: Optional[Tolerance] = None,
    center: Optional[Sequence[float]] = None,
) -> GroupClass:
    """Classify a closed rotation set by order and axis-fold signature.

    The principal axis of D2 needs the point set; without it D2 is returned
    with no principal.
    """
    rots = sorted(rotations, key=_sort_key)
    if not rots or any(op.order is None for op in rots):
        raise SymmetryError("unclassifiable rotation set")
    multiplication_table(rots)

    count = len(rots)
    axes = _collect_axes(rots)
    folds = Counter(axis.fold for axis in axes)

    if count == 1:
        return GroupClass(GroupKind.CYCLIC, k=1, rotations=tuple(rots))
    if len(axes) == 1 and axes[0].fold == count:
        return GroupClass(
            GroupKind.CYCLIC, k=count, axes=tuple(axes), principal=axes[0].direction,
            rotations=tuple(rots),
        )
    if count == 4 and folds == {2: 3}:
        principal = None
        if points is not None:
            principal = principal_axis_d2(points, [ax.direction for ax in axes], tol, center)
        return GroupClass(
            GroupKind.DIHEDRAL, k=2, axes=tuple(axes), principal=principal, rotations=tuple(rots)
        )
    ell = count // 2
    if count % 2 == 0 and ell >= 3 and folds == {ell: 1, 2: ell}:
        main = next(ax.direction for ax in axes if ax.fold == ell)
        if all(abs(float(np.dot(main, ax.direction))) <= 1e-6 for ax in axes if ax.fold == 2):
            return GroupClass(
                GroupKind.DIHEDRAL, k=ell, axes=tuple(axes), principal=main, rotations=tuple(rots)
            )
    for kind in POLYHEDRAL_KINDS:
        if count == POLYHEDRAL_ORDERS[kind] and folds == AXIS_SIGNATURES[kind]:
            return GroupClass(kind, axes=tuple(axes), rotations=tuple(rots))

    raise SymmetryError(
        f"unclassifiable rotation set (order {count}, axis folds {dict(sorted(folds.items()))})"
    )


def principal_axis_d2(
    P: PointsLike,
    axes: Sequence[Sequence[float]],
    tol: Optional[Tolerance] = None,
    center: Optional[Sequence[float]] = None,
) -> np.ndarray:
    """The D2 axis distinguishable by its (distance-to-axis, |height|) multiset."""
    tol = resolve_tolerance(tol)
    S = as_points(P)
    b = np.asarray(center, dtype=float) if center is not None else smallest_enclosing_ball(S, tol).center
    X = S - b
    scale = max(float(np.max(np.linalg.norm(X, axis=1))), tol.absolute)
    step = scale * 1e-6

    directions = [canonical_axis(u) for u in axes]
    if len(directions) != 3:
        raise SymmetryError("principal_axis_d2 needs exactly three axes")
    signatures = []
    for u in directions:
        height = X @ u
        distance = np.linalg.norm(X - np.outer(height, u), axis=1)
        pairs = np.column_stack([quantize(distance, step), quantize(np.abs(height), step)])
        signatures.append(tuple(sorted(map(tuple, pairs.tolist()))))

    if signatures[0] == signatures[1] == signatures[2]:
        raise SymmetryError("supergroup of D2 present")
    unique = [
        i for i in range(3)
        if signatures[i] != signatures[(i + 1) % 3] and signatures[i] != signatures[(i + 2) % 3]
    ]
    if len(unique) == 1:
        return directions[unique[0]]
    # All three differ: the lexicographically greatest signature wins
    return directions[max(range(3), key=lambda i: signatures[i])]


def _closure(table: np.ndarray, identity: int, generators: Sequence[int], limit: int) -> Optional[set]:
    members = {identity}
    frontier = [identity]
    while frontier:
        grown = []
        for x in frontier:
            for g in generators:
                y = int(table[x, g])
                if y not in members:
                    members.add(y)
                    grown.append(y)
        if len(members) > limit:
            return None
        frontier = grown
    return members


_SECOND_GENERATOR_ORDER = {
    GroupKind.TETRAHEDRAL: 2,
    GroupKind.OCTAHEDRAL: 4,
    GroupKind.ICOSAHEDRAL: 5,
}


def find_subgroup(rotations: Sequence[RotationOp], target: GroupKind) -> Optional[List[RotationOp]]:
    """A subgroup isomorphic to T, O or I, or None when none embeds."""
    if target not in POLYHEDRAL_ORDERS:
        raise ValueError(f"find_subgroup target must be T, O or I, got {target}")
    rots = sorted(rotations, key=_sort_key)
    count = len(rots)
    size = POLYHEDRAL_ORDERS[target]
    profile = ORDER_PROFILES[target]
    if count < size or count % size:
        return None

    orders = [op.order for op in rots]
    if count == size:
        return list(rots) if Counter(orders) == profile else None

    table = multiplication_table(rots)
    identity = orders.index(1)
    threes = [i for i, o in enumerate(orders) if o == 3]
    partners = [i for i, o in enumerate(orders) if o == _SECOND_GENERATOR_ORDER[target]]
    for i in threes:
        for j in partners:
            members = _closure(table, identity, (i, j), size)
            if members is None or len(members) != size:
                continue
            if Counter(orders[m] for m in members) == profile:
                logger.debug(f"Found {target.symbol} subgroup from generators {i}, {j}")
                return [rots[m] for m in sorted(members)]
    return None


def generate_group(
    generators: Sequence[np.ndarray],
    tol: Optional[Tolerance] = None,
    limit: int = 120,
    atol: float = 1e-9,
) -> List[RotationOp]:
    """Closure of rotation matrices under composition; products within atol are merged."""
    elements = [np.eye(3)]
    frontier = [np.eye(3)]
    gens = [np.asarray(g, dtype=float) for g in generators]
    while frontier:
        grown = []
        for m in frontier:
            for g in gens:
                product = g @ m
                if not any(np.allclose(product, q, atol=atol) for q in elements):
                    elements.append(product)
                    grown.append(product)
        if len(elements) > limit:
            raise SymmetryError("generated group is not finite")
        frontier = grown
    ops = [RotationOp.from_matrix(m, tol) for m in elements]
    ops.sort(key=_sort_key)
    return ops


def rotation_group(
    P: PointsLike, tol: Optional[Tolerance] = None, center: Optional[Sequence[float]] = None
) -> GroupClass:
    """gamma(P), with collinear sets short-circuited to the Collinear kind."""
    tol = resolve_tolerance(tol)
    S = as_points(P)
    if len(S) == 0:
        raise GeometryError("empty point set")
    b = np.asarray(center, dtype=float) if center is not None else smallest_enclosing_ball(S, tol).center
    X = S - b
    eps = tol.eps(float(np.max(np.linalg.norm(X, axis=1))))
    line = _collinear_direction(X, eps)
    if line is not None:
        return GroupClass(GroupKind.COLLINEAR, principal=line)
    return classify_rotation_group(enumerate_rotations(S, tol, b), points=S, tol=tol, center=b)
