"""Canonical transitive point sets: regular and semi-regular solids, prisms, orbits."""

from __future__ import annotations

import functools
import logging
import math
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.transform import Rotation

from .decomposition import orbit_of
from .geometry import RotationOp, as_points, smallest_enclosing_ball
from .symmetry import POLYHEDRAL_KINDS, GroupKind, find_subgroup, generate_group

logger = logging.getLogger(__name__)

PHI = (1.0 + math.sqrt(5.0)) / 2.0

# Real root of t^3 - t^2 - t - 1 (snub cube)
TRIBONACCI = float(np.real(next(r for r in np.roots([1.0, -1.0, -1.0, -1.0]) if abs(r.imag) < 1e-12)))

# Real root of x^3 - 2x - PHI (snub dodecahedron)
_XI = float(np.real(next(r for r in np.roots([1.0, 0.0, -2.0, -PHI]) if abs(r.imag) < 1e-12)))
_SNUB_ALPHA = _XI - 1.0 / _XI
_SNUB_BETA = _XI * PHI + PHI ** 2 + PHI / _XI

_HALF_TURN_Z = np.diag([-1.0, -1.0, 1.0])
_CYCLE_XYZ = np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
_QUARTER_TURN_Z = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])


@functools.lru_cache(maxsize=None)
def tetrahedral_group() -> Tuple[RotationOp, ...]:
    """T with its 2-fold axes on the coordinate axes."""
    return tuple(generate_group([_HALF_TURN_Z, _CYCLE_XYZ]))


@functools.lru_cache(maxsize=None)
def octahedral_group() -> Tuple[RotationOp, ...]:
    return tuple(generate_group([_HALF_TURN_Z, _CYCLE_XYZ, _QUARTER_TURN_Z]))


@functools.lru_cache(maxsize=None)
def icosahedral_group() -> Tuple[RotationOp, ...]:
    """I containing tetrahedral_group(), with a 5-fold axis through (0, 1, PHI)."""
    axis = np.array([0.0, 1.0, PHI]) / math.sqrt(1.0 + PHI ** 2)
    fifth = Rotation.from_rotvec(axis * 2.0 * math.pi / 5.0).as_matrix()
    return tuple(generate_group([_HALF_TURN_Z, _CYCLE_XYZ, fifth]))


GROUPS: Dict[GroupKind, Callable[[], Tuple[RotationOp, ...]]] = {
    GroupKind.TETRAHEDRAL: tetrahedral_group,
    GroupKind.OCTAHEDRAL: octahedral_group,
    GroupKind.ICOSAHEDRAL: icosahedral_group,
}


def group_elements(kind: GroupKind) -> Tuple[RotationOp, ...]:
    try:
        return GROUPS[kind]()
    except KeyError:
        raise ValueError(f"no canonical group for {kind}") from None


def embeds(small: GroupKind, large: GroupKind) -> bool:
    """Whether the polyhedral group ``small`` is a subgroup of ``large``."""
    if small not in POLYHEDRAL_KINDS or large not in POLYHEDRAL_KINDS:
        raise ValueError("embeds compares T, O and I only")
    return find_subgroup(group_elements(large), small) is not None


def _scaled(points: np.ndarray, circumradius: float, recenter: bool = False) -> np.ndarray:
    if circumradius <= 0:
        raise ValueError(f"circumradius must be positive, got {circumradius}")
    pts = as_points(points)
    if recenter:
        pts = pts - smallest_enclosing_ball(pts).center
    return pts * (circumradius / float(np.max(np.linalg.norm(pts, axis=1))))


def orbit(group: GroupKind | str, seed: Sequence[float], circumradius: Optional[float] = None) -> np.ndarray:
    """Orbit of seed under the canonical T, O or I."""
    kind = group if isinstance(group, GroupKind) else GroupKind.from_symbol(group)
    points = orbit_of(seed, group_elements(kind))
    if circumradius is None:
        return points
    return _scaled(points, circumradius)


def _two_orbits(kind: GroupKind, seed: Sequence[float]) -> np.ndarray:
    s = np.asarray(seed, dtype=float)
    return np.vstack([orbit(kind, s), orbit(kind, -s)])


_T, _O, _I = GroupKind.TETRAHEDRAL, GroupKind.OCTAHEDRAL, GroupKind.ICOSAHEDRAL
_SQRT2 = math.sqrt(2.0)

SOLIDS: Dict[str, Callable[[], np.ndarray]] = {
    "tetrahedron": lambda: orbit(_T, (1.0, 1.0, 1.0)),
    "octahedron": lambda: orbit(_O, (1.0, 0.0, 0.0)),
    "cube": lambda: orbit(_O, (1.0, 1.0, 1.0)),
    "icosahedron": lambda: orbit(_I, (0.0, 1.0, PHI)),
    "dodecahedron": lambda: orbit(_I, (1.0, 1.0, 1.0)),
    "cuboctahedron": lambda: orbit(_O, (1.0, 1.0, 0.0)),
    "icosidodecahedron": lambda: orbit(_I, (0.0, 0.0, PHI)),
    "truncated_tetrahedron": lambda: orbit(_T, (3.0, 1.0, 1.0)),
    "truncated_cube": lambda: orbit(_O, (_SQRT2 - 1.0, 1.0, 1.0)),
    "truncated_octahedron": lambda: orbit(_O, (0.0, 1.0, 2.0)),
    "rhombicuboctahedron": lambda: orbit(_O, (1.0, 1.0, 1.0 + _SQRT2)),
    "snub_cube": lambda: orbit(_O, (1.0, 1.0 / TRIBONACCI, TRIBONACCI)),
    "truncated_cuboctahedron": lambda: _two_orbits(_O, (1.0, 1.0 + _SQRT2, 1.0 + 2.0 * _SQRT2)),
    "truncated_icosahedron": lambda: orbit(_I, (0.0, 1.0, 3.0 * PHI)),
    "truncated_dodecahedron": lambda: orbit(_I, (0.0, 2.0 + PHI, 1.0 / PHI)),
    "rhombicosidodecahedron": lambda: orbit(_I, (1.0, 1.0, PHI ** 3)),
    "snub_dodecahedron": lambda: orbit(_I, (2.0, 2.0 * _SNUB_ALPHA, 2.0 * _SNUB_BETA)),
    "truncated_icosidodecahedron": lambda: _two_orbits(_I, (1.0 / PHI, 1.0 / PHI, 3.0 + PHI)),
}

# Semi-regular solids; all but the icosidodecahedron are unsolvable
ARCHIMEDEAN = (
    "cuboctahedron",
    "icosidodecahedron",
    "truncated_tetrahedron",
    "truncated_cube",
    "truncated_octahedron",
    "rhombicuboctahedron",
    "snub_cube",
    "truncated_cuboctahedron",
    "truncated_icosahedron",
    "truncated_dodecahedron",
    "rhombicosidodecahedron",
    "snub_dodecahedron",
    "truncated_icosidodecahedron",
)

PLATONIC = ("tetrahedron", "octahedron", "cube", "icosahedron", "dodecahedron")


def regular_polygon(k: int, radius: float = 1.0, height: float = 0.0, phase: float = 0.0) -> np.ndarray:
    if k < 3:
        raise ValueError(f"a polygon needs at least 3 vertices, got {k}")
    angles = phase + 2.0 * math.pi * np.arange(k) / k
    return np.column_stack([radius * np.cos(angles), radius * np.sin(angles), np.full(k, height)])


def prism(k: int, height: float = 1.0) -> np.ndarray:
    return np.vstack([regular_polygon(k, height=height / 2.0), regular_polygon(k, height=-height / 2.0)])


def pyramid(k: int, height: float = 1.0) -> np.ndarray:
    return np.vstack([regular_polygon(k), [[0.0, 0.0, height]]])


def bipyramid(k: int, top: float = 1.0, bottom: float = 1.0) -> np.ndarray:
    """k-gon with apexes at +top and -bottom on its axis (C_k when top != bottom)."""
    return np.vstack([regular_polygon(k), [[0.0, 0.0, top]], [[0.0, 0.0, -bottom]]])


def sphenoid(a: float = 1.0, b: float = 2.0, c: float = 3.0) -> np.ndarray:
    """Disphenoid with D2 symmetry about the coordinate axes."""
    return np.array([[a, b, c], [a, -b, -c], [-a, b, -c], [-a, -b, c]], dtype=float)


def compound(parts: Sequence[Tuple[str, float]]) -> np.ndarray:
    """Concentric union of named solids, each at its own circumradius."""
    if not parts:
        raise ValueError("compound needs at least one part")
    return np.vstack([generate_polyhedron(name, radius) for name, radius in parts])


_PARAMETRIC = {
    "prism": prism,
    "pyramid": pyramid,
    "bipyramid": bipyramid,
    "sphenoid": sphenoid,
}

GENERATOR_NAMES = tuple(SOLIDS) + tuple(_PARAMETRIC) + ("orbit", "compound")


def generate_polyhedron(name: str, circumradius: float = 1.0, **params) -> np.ndarray:
    """Vertex set of a named generator, scaled to circumradius about b(P) = origin.

    Parametric generators take keyword parameters: prism(k, height),
    pyramid(k, height), bipyramid(k, top, bottom), sphenoid(a, b, c),
    orbit(group, seed) and compound(parts).
    """
    key = name.strip().lower()
    if key in SOLIDS:
        if params:
            raise ValueError(f"{key} takes no parameters, got {sorted(params)}")
        return _scaled(SOLIDS[key](), circumradius)
    if key in _PARAMETRIC:
        return _scaled(_PARAMETRIC[key](**params), circumradius, recenter=True)
    if key == "orbit":
        if set(params) != {"group", "seed"}:
            raise ValueError("orbit needs exactly the parameters group and seed")
        return _scaled(orbit(params["group"], params["seed"]), circumradius)
    if key == "compound":
        # Parts carry their own radii
        return compound(params["parts"])
    raise ValueError(f"unknown polyhedron generator: {name!r}")


def tetrahedron_with_truncated_tetrahedron(inner: float = 1.0, outer: float = 2.0) -> np.ndarray:
    """Concentric T-symmetric 16-point set: 4-orbit inside a 12-orbit."""
    return compound([("tetrahedron", inner), ("truncated_tetrahedron", outer)])


def cuboctahedron_with_truncated_cube(inner: float = 1.0, outer: float = 2.0) -> np.ndarray:
    """Concentric O-symmetric 36-point set: O-orbits of sizes 12 and 24."""
    return compound([("cuboctahedron", inner), ("truncated_cube", outer)])
