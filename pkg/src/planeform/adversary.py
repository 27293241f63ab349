"""Symmetric local frames that keep an unsolvable configuration symmetric forever."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.transform import Rotation

from .config import SETTINGS
from .decomposition import orbits_under
from .errors import AdversaryError
from .geometry import (
    PointsLike,
    RotationOp,
    Tolerance,
    as_points,
    resolve_tolerance,
    smallest_enclosing_ball,
)
from .simulation import Algorithm, Frame, Trace, resolve_algorithm, run
from .solvability import check_solvable
from .symmetry import POLYHEDRAL_ORDERS, GroupKind, find_subgroup, rotation_group

logger = logging.getLogger(__name__)

# Largest residual of g(P) against P, relative to the radius, still counted as symmetric
CLOSURE_RATIO = 1e-9


@dataclass(frozen=True, eq=False)
class AdversaryPlan:
    """Embedded group G, one base frame per G-orbit and g_j for every robot j."""

    group_kind: GroupKind
    embedding: Tuple[RotationOp, ...]
    assignment: Tuple[int, ...]
    orbits: Tuple[Tuple[int, ...], ...]
    base_frames: Tuple[Frame, ...]
    positions: np.ndarray
    center: np.ndarray

    def frames(self) -> List[Frame]:
        """Z_j = g_j applied to its orbit's base frame, placed at p_j."""
        base_of = {j: k for k, orbit in enumerate(self.orbits) for j in orbit}
        frames = []
        for j, g in enumerate(self.assignment):
            base = self.base_frames[base_of[j]]
            rotation = self.embedding[g].matrix @ base.rotation
            frames.append(Frame(rotation, base.scale, self.positions[j]))
        return frames


def adversary_group(P: PointsLike, tol: Optional[Tolerance] = None) -> GroupKind:
    """T, O or I by the smallest orbit size 12, 24 or 60."""
    verdict = check_solvable(P, tol)
    if verdict.solvable:
        raise AdversaryError(f"no adversary exists: {verdict.reason}")
    return verdict.witness


def plan_adversary(
    P: PointsLike,
    kind: Optional[GroupKind] = None,
    seed: Optional[int] = None,
    tol: Optional[Tolerance] = None,
) -> AdversaryPlan:
    tol = resolve_tolerance(tol)
    S = as_points(P)
    if kind is None:
        kind = adversary_group(S, tol)
    if kind not in POLYHEDRAL_ORDERS:
        raise AdversaryError(f"adversary group must be T, O or I, got {kind}")

    center = smallest_enclosing_ball(S, tol).center
    group = rotation_group(S, tol, center=center)
    embedding = find_subgroup(group.rotations, kind) if group.is_3d else None
    if embedding is None:
        raise AdversaryError(f"{kind.symbol} does not embed in {group.label}")

    orbits, foldings = orbits_under(S, embedding, tol, center)
    if any(f > 1 for f in foldings):
        sizes = [len(orbit) for orbit in orbits]
        raise AdversaryError(f"folding > 1, construction inapplicable: {kind.symbol}-orbit sizes {sizes}")

    X = S - center
    tree = cKDTree(X)
    assignment = [-1] * len(S)
    for orbit in orbits:
        for g, op in enumerate(embedding):
            _, j = tree.query(op.matrix @ X[orbit[0]])
            assignment[int(j)] = g

    rng = np.random.default_rng(SETTINGS.default_seed if seed is None else seed)
    rotations = Rotation.random(len(orbits), random_state=rng).as_matrix().reshape(len(orbits), 3, 3)
    scales = np.exp(rng.uniform(math.log(SETTINGS.scale_min), math.log(SETTINGS.scale_max), size=len(orbits)))
    base_frames = tuple(Frame(R, float(s), S[orbit[0]]) for R, s, orbit in zip(rotations, scales, orbits))
    logger.debug(f"Adversary {kind.symbol} over {len(orbits)} orbits of size {POLYHEDRAL_ORDERS[kind]}")
    return AdversaryPlan(
        group_kind=kind,
        embedding=tuple(embedding),
        assignment=tuple(assignment),
        orbits=tuple(tuple(orbit) for orbit in orbits),
        base_frames=base_frames,
        positions=S,
        center=center,
    )


def build_symmetric_frames(
    P: PointsLike, G: GroupKind | str, seed: Optional[int] = None, tol: Optional[Tolerance] = None
) -> List[Frame]:
    """Frames under which robots related by G see identical observations."""
    kind = G if isinstance(G, GroupKind) else GroupKind.from_symbol(G)
    return plan_adversary(P, kind, seed, tol).frames()


def symmetry_residual(P: PointsLike, rotations: Sequence[RotationOp], center: Sequence[float]) -> float:
    """Largest distance from g(p) to P over every g and p; zero when P admits all g."""
    X = as_points(P) - np.asarray(center, dtype=float)
    tree = cKDTree(X)
    mats = np.stack([op.matrix for op in rotations])
    images = np.einsum("gab,nb->gna", mats, X).reshape(-1, 3)
    dist, _ = tree.query(images)
    return float(dist.max())


@dataclass(frozen=True, eq=False)
class AdversaryReport:
    group_kind: GroupKind
    trace: Trace
    residuals: Tuple[float, ...]
    closure_tolerance: float
    requested_cycles: int

    @property
    def cycles(self) -> int:
        return self.trace.cycles

    @property
    def halted(self) -> bool:
        return self.trace.status == "halted"

    @property
    def closed(self) -> bool:
        return not self.halted and all(r <= self.closure_tolerance for r in self.residuals)

    @property
    def ever_planar(self) -> bool:
        return any(entry.conditions is not None and entry.conditions.t3 for entry in self.trace.entries)

    @property
    def held(self) -> bool:
        """G-symmetry kept and no plane formed for every requested cycle."""
        return self.closed and not self.ever_planar and self.cycles == self.requested_cycles

    def summary(self) -> str:
        symbol = self.group_kind.symbol
        if self.halted:
            return f"halted after {self.cycles} of {self.requested_cycles} cycles: {self.trace.error}"
        if self.held:
            return f"γ ⊇ {symbol} for {self.cycles} cycles; never planar"
        if not self.closed:
            worst = max(self.residuals)
            return f"γ ⊉ {symbol}: closure residual {worst:.3g} after {self.cycles} of {self.requested_cycles} cycles"
        if self.ever_planar:
            return f"γ ⊇ {symbol} for {self.cycles} of {self.requested_cycles} cycles; became planar"
        return f"γ ⊇ {symbol} for only {self.cycles} of {self.requested_cycles} cycles"


def adversarial_run(
    P: PointsLike,
    algorithm: Algorithm | str,
    cycles: int,
    kind: Optional[GroupKind] = None,
    seed: Optional[int] = None,
    tol: Optional[Tolerance] = None,
) -> AdversaryReport:
    """Run ``cycles`` FSYNC cycles under symmetric frames and check G-closure each cycle.

    Named algorithms run unguarded so unsolvable inputs keep moving.
    """
    tol = resolve_tolerance(tol)
    if isinstance(algorithm, str):
        name, step = algorithm, resolve_algorithm(algorithm, guard=False, tol=tol)
    else:
        name, step = "custom", algorithm
    plan = plan_adversary(P, kind, seed, tol)
    trace = run(plan.positions, plan.frames(), step, cycles, tol, algorithm_name=name, seed=seed)
    residuals = []
    for entry in trace.entries:
        radius = float(np.max(np.linalg.norm(entry.positions - plan.center, axis=1)))
        residuals.append(symmetry_residual(entry.positions, plan.embedding, plan.center) / radius)
    report = AdversaryReport(plan.group_kind, trace, tuple(residuals), CLOSURE_RATIO, cycles)
    logger.info(report.summary(), extra={"cycles": report.cycles, "group": plan.group_kind.symbol})
    return report
