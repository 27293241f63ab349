"""FSYNC Look-Compute-Move engine over robots with right-handed local frames."""

from __future__ import annotations

import functools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.transform import Rotation

from .conditions import ConfigurationAnalysis, Conditions, analyze_configuration, seeded_analyses
from .config import SETTINGS
from .errors import GeometryError, PlaneformError
from .formation import FaceChoice, go_to_midpoint_step, plane_formation_step
from .geometry import (
    PointsLike,
    Tolerance,
    as_points,
    best_fit_plane,
    dedupe_points,
    has_multiplicity,
    is_collinear,
    lexicographic_order,
    min_pairwise_distance,
    resolve_tolerance,
    smallest_enclosing_ball,
)
from .symmetry import GroupClass

logger = logging.getLogger(__name__)

# Destination in the robot's own frame, given its observation and own row index
Algorithm = Callable[[np.ndarray, int], np.ndarray]

# Largest plane deviation, relative to rad(B), a terminal configuration may show
COPLANARITY_RATIO = 1e-7


@dataclass(frozen=True, eq=False)
class Frame:
    """Local coordinate system Z_i: rotation, unit length and current position."""

    rotation: np.ndarray
    scale: float
    origin: np.ndarray

    def __post_init__(self):
        R = np.asarray(self.rotation, dtype=float)
        if R.shape != (3, 3) or not np.allclose(R.T @ R, np.eye(3), atol=1e-9):
            raise GeometryError("frame rotation must be orthonormal")
        if np.linalg.det(R) <= 0:
            raise GeometryError("frame must be right-handed")
        if not self.scale > 0:
            raise GeometryError(f"frame scale must be positive, got {self.scale}")
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "origin", np.asarray(self.origin, dtype=float))

    @classmethod
    def identity(cls, origin: Sequence[float]) -> Frame:
        return cls(np.eye(3), 1.0, np.asarray(origin, dtype=float))

    def observe(self, P: PointsLike) -> np.ndarray:
        return (as_points(P) - self.origin) @ self.rotation / self.scale

    def to_global(self, local: PointsLike) -> np.ndarray:
        return self.origin + self.scale * as_points(local) @ self.rotation.T

    def moved_to(self, origin: Sequence[float]) -> Frame:
        return replace(self, origin=np.asarray(origin, dtype=float))


def observe(P: PointsLike, frame: Frame) -> np.ndarray:
    """Positions of P in the frame's coordinates; the observer lands on the origin."""
    return frame.observe(P)


def _canonical_order(local: np.ndarray, tol: Tolerance) -> List[int]:
    scale = float(np.max(np.abs(local))) if local.size else 0.0
    return lexicographic_order(local, tol.eps(scale))


def canonical_observation(local: np.ndarray, self: int, tol: Optional[Tolerance] = None) -> Tuple[np.ndarray, int]:
    """Rows sorted lexicographically so algorithms never see global indices."""
    order = _canonical_order(local, resolve_tolerance(tol))
    return local[order], order.index(self)


def random_frames(
    P: PointsLike, seed: Optional[int] = None, scale_range: Optional[Tuple[float, float]] = None
) -> List[Frame]:
    """Uniform random rotations and log-uniform scales, reproducible from the seed."""
    S = as_points(P)
    rng = np.random.default_rng(SETTINGS.default_seed if seed is None else seed)
    low, high = scale_range or (SETTINGS.scale_min, SETTINGS.scale_max)
    rotations = Rotation.random(len(S), random_state=rng).as_matrix().reshape(len(S), 3, 3)
    scales = np.exp(rng.uniform(math.log(low), math.log(high), size=len(S)))
    return [Frame(R, float(s), p) for R, s, p in zip(rotations, scales, S)]


def _compute(look: Tuple[Frame, np.ndarray, int], algorithm: Algorithm) -> np.ndarray:
    frame, local, self = look
    destination = np.asarray(algorithm(local, self), dtype=float)
    return frame.to_global(destination[None, :])[0]


def _shared_analysis(S: np.ndarray, tol: Tolerance) -> Optional[ConfigurationAnalysis]:
    try:
        return analyze_configuration(S, tol)
    except PlaneformError as e:
        logger.debug(f"No shared analysis for this snapshot: {e}")
        return None


def compute_destinations(
    P: PointsLike,
    frames: Sequence[Frame],
    algorithm: Algorithm,
    tol: Optional[Tolerance] = None,
    workers: Optional[int] = None,
    analysis: Optional[ConfigurationAnalysis] = None,
) -> np.ndarray:
    """Look and Compute for every robot against the same snapshot.

    The snapshot is analysed once; each robot's analysis is that one mapped
    into its frame, so analyze_configuration on an observation is a lookup.
    """
    tol = resolve_tolerance(tol)
    S = as_points(P)
    if len(frames) != len(S):
        raise ValueError(f"{len(frames)} frames for {len(S)} robots")
    workers = workers or SETTINGS.compute_workers
    if analysis is None:
        analysis = _shared_analysis(S, tol)

    looks, seeds = [], []
    for frame in frames:
        raw = frame.observe(S)
        order = _canonical_order(raw, tol)
        local = raw[order]
        self = int(np.argmin(np.linalg.norm(S - frame.origin, axis=1)))
        looks.append((frame, local, order.index(self)))
        if analysis is not None:
            seeds.append(analysis.in_frame(local, frame.rotation, frame.scale, frame.origin, order))

    task = functools.partial(_compute, algorithm=algorithm)
    with seeded_analyses(seeds):
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                rows = list(pool.map(task, looks))
        else:
            rows = [task(look) for look in looks]
    return np.array(rows, dtype=float).reshape(len(S), 3)


def fsync_step(
    P: PointsLike,
    frames: Sequence[Frame],
    algorithm: Algorithm,
    tol: Optional[Tolerance] = None,
    workers: Optional[int] = None,
    analysis: Optional[ConfigurationAnalysis] = None,
) -> Tuple[np.ndarray, List[Frame]]:
    """One synchronous cycle: every robot moves to its destination at once."""
    destinations = compute_destinations(P, frames, algorithm, tol, workers, analysis)
    return destinations, [frame.moved_to(d) for frame, d in zip(frames, destinations)]


@dataclass(frozen=True, eq=False)
class TraceEntry:
    cycle: int
    positions: np.ndarray
    destinations: Optional[np.ndarray]
    conditions: Optional[Conditions]
    group: Optional[GroupClass]
    multiplicity: bool


@dataclass(frozen=True, eq=False)
class Trace:
    entries: Tuple[TraceEntry, ...]
    status: str
    n: int
    algorithm: str = "custom"
    seed: Optional[int] = None
    error: Optional[str] = None

    @property
    def terminal(self) -> bool:
        return self.status == "terminal"

    @property
    def cycles(self) -> int:
        """Number of moves performed."""
        return len(self.entries) - 1

    @property
    def final(self) -> np.ndarray:
        return self.entries[-1].positions


def _describe(P: np.ndarray, tol: Tolerance) -> Tuple[Optional[ConfigurationAnalysis], Optional[Conditions], Optional[GroupClass], bool]:
    """Analysis of P (None under multiplicity) and the conditions and group recorded in the trace."""
    scale = smallest_enclosing_ball(P, tol).radius
    multiplicity = has_multiplicity(P, tol.eps(scale))
    distinct = dedupe_points(P, tol.eps(scale)) if multiplicity else P
    try:
        analysis = analyze_configuration(distinct, tol)
    except PlaneformError as e:
        logger.debug(f"Configuration analysis failed: {e}")
        return None, None, None, multiplicity
    return (None if multiplicity else analysis), analysis.conditions, analysis.group, multiplicity


def run(
    P0: PointsLike,
    frames: Sequence[Frame],
    algorithm: Algorithm,
    max_cycles: Optional[int] = None,
    tol: Optional[Tolerance] = None,
    workers: Optional[int] = None,
    algorithm_name: str = "custom",
    seed: Optional[int] = None,
) -> Trace:
    """Step until T3 holds with nobody moving, or max_cycles moves were made."""
    tol = resolve_tolerance(tol)
    max_cycles = SETTINGS.max_cycles if max_cycles is None else max_cycles
    if max_cycles < 1:
        raise ValueError(f"max_cycles must be at least 1, got {max_cycles}")
    P = as_points(P0)
    frames = list(frames)
    entries: List[TraceEntry] = []
    status, error = "max_cycles", None

    for cycle in range(max_cycles + 1):
        analysis, conditions, group, multiplicity = _describe(P, tol)
        if cycle == max_cycles:
            entries.append(TraceEntry(cycle, P, None, conditions, group, multiplicity))
            break
        try:
            destinations, next_frames = fsync_step(P, frames, algorithm, tol, workers, analysis)
        except PlaneformError as e:
            logger.warning(f"Run halted at cycle {cycle}: {e}", extra={"cycle": cycle, "n": len(P)})
            entries.append(TraceEntry(cycle, P, None, conditions, group, multiplicity))
            status, error = "halted", str(e)
            break
        entries.append(TraceEntry(cycle, P, destinations, conditions, group, multiplicity))
        logger.info(
            f"Cycle {cycle} computed",
            extra={
                "cycle": cycle,
                "n": len(P),
                "group": group.label if group else None,
                "phase": conditions.phase if conditions else None,
            },
        )
        scale = smallest_enclosing_ball(P, tol).radius
        if conditions is not None and conditions.t3 and np.all(np.linalg.norm(destinations - P, axis=1) <= tol.eps(scale)):
            status = "terminal"
            break
        P, frames = destinations, next_frames

    return Trace(tuple(entries), status, len(as_points(P0)), algorithm_name, seed, error)


@dataclass(frozen=True)
class TerminalReport:
    coplanar: bool
    max_deviation_ratio: float
    distinct: bool
    min_distance: float
    collinear: bool

    @property
    def passed(self) -> bool:
        return self.coplanar and self.distinct

    def lines(self) -> List[str]:
        return [
            f"coplanar: {'PASS' if self.coplanar else 'FAIL'} (max deviation {self.max_deviation_ratio:.3g} x rad(B))",
            f"distinct: {'PASS' if self.distinct else 'FAIL'} (min distance {self.min_distance:.6g})",
            f"collinear: {'yes' if self.collinear else 'no'}",
        ]


def verify_terminal(P: PointsLike, tol: Optional[Tolerance] = None) -> TerminalReport:
    """Check the goal configuration: one plane, distinct points, and whether on a line."""
    tol = resolve_tolerance(tol)
    S = as_points(P)
    radius = smallest_enclosing_ball(S, tol).radius
    _, deviation = best_fit_plane(S)
    ratio = deviation / radius if radius > 0 else 0.0
    gap = min_pairwise_distance(S)
    return TerminalReport(
        coplanar=ratio <= COPLANARITY_RATIO,
        max_deviation_ratio=ratio,
        distinct=gap > tol.eps(radius),
        min_distance=gap,
        collinear=is_collinear(S, tol, scale=radius),
    )


def plane_formation_algorithm(
    *, guard: bool = True, choice: FaceChoice = FaceChoice(), tol: Optional[Tolerance] = None
) -> Algorithm:
    return functools.partial(plane_formation_step, guard=guard, choice=choice, tol=tol)


def go_to_midpoint_algorithm(*, edge_choice: int = 0, tol: Optional[Tolerance] = None, guard: bool = False) -> Algorithm:
    return functools.partial(go_to_midpoint_step, edge_choice=edge_choice, guard=guard, tol=tol)


ALGORITHMS: Dict[str, Callable[..., Algorithm]] = {
    "plane_formation": plane_formation_algorithm,
    "go_to_midpoint": go_to_midpoint_algorithm,
}


def resolve_algorithm(name: str, **options) -> Algorithm:
    try:
        factory = ALGORITHMS[name]
    except KeyError:
        raise ValueError(f"unknown algorithm {name!r}, expected one of {sorted(ALGORITHMS)}") from None
    return factory(**options)

