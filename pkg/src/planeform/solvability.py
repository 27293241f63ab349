"""Decision oracle: can oblivious FSYNC robots form a plane from P?"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import GeometryError
from .geometry import (
    PointsLike,
    Tolerance,
    as_points,
    has_multiplicity,
    is_coplanar,
    resolve_tolerance,
    smallest_enclosing_ball,
)
from .decomposition import gamma_decomposition
from .symmetry import GroupClass, GroupKind, rotation_group

logger = logging.getLogger(__name__)

# Orbit sizes that carry a tetrahedral, octahedral or icosahedral adversary
SYMMETRIC_ORBIT_SIZES = frozenset({12, 24, 60})

WITNESS_BY_SIZE = {
    12: GroupKind.TETRAHEDRAL,
    24: GroupKind.OCTAHEDRAL,
    60: GroupKind.ICOSAHEDRAL,
}


@dataclass(frozen=True)
class Verdict:
    solvable: bool
    group: GroupClass
    orbit_sizes: Tuple[int, ...]
    witness: Optional[GroupKind] = None
    breakable_index: Optional[int] = None
    reason: str = ""

    def summary(self) -> str:
        sizes = ", ".join(str(s) for s in self.orbit_sizes)
        if self.solvable:
            return f"solvable: group {self.group.label}, orbits [{sizes}] ({self.reason})"
        return (
            f"unsolvable: group {self.group.label}, orbits [{sizes}], "
            f"adversary {self.witness.symbol}"
        )


def check_solvable(P: PointsLike, tol: Optional[Tolerance] = None) -> Verdict:
    """Solvable iff gamma(P) is 2D or some orbit size is outside {12, 24, 60}."""
    tol = resolve_tolerance(tol)
    S = as_points(P)
    if len(S) == 0:
        raise GeometryError("empty point set")
    ball = smallest_enclosing_ball(S, tol)
    eps = tol.eps(ball.radius)
    if has_multiplicity(S, eps):
        raise GeometryError("multiplicity")

    group = rotation_group(S, tol, center=ball.center)
    sizes = gamma_decomposition(S, tol, group=group, center=ball.center).sizes
    if len(S) <= 3 or is_coplanar(S, tol, scale=ball.radius):
        return Verdict(True, group, sizes, reason="already planar")
    if float(np.min(np.linalg.norm(S - ball.center, axis=1))) <= eps:
        return Verdict(True, group, sizes, reason="robot at the center")
    if group.is_2d:
        return Verdict(True, group, sizes, reason="2D rotation group")

    for index, size in enumerate(sizes):
        if size not in SYMMETRIC_ORBIT_SIZES:
            return Verdict(True, group, sizes, breakable_index=index, reason=f"orbit {index} of size {size}")

    witness = WITNESS_BY_SIZE[min(sizes)]
    logger.debug(f"Unsolvable configuration: group {group.label}, orbits {sizes}")
    return Verdict(False, group, sizes, witness=witness, reason="every orbit size in {12, 24, 60}")
