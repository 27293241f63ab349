"""Slow reference implementations the library results are checked against."""

import itertools
import math
import os
from typing import Optional, Tuple

import numpy as np
from scipy.spatial.transform import Rotation


def _circumball(S: np.ndarray) -> Optional[Tuple[np.ndarray, float]]:
    """Smallest sphere through every row of S, or None for a degenerate subset."""
    if len(S) == 1:
        return S[0], 0.0
    U = S[1:] - S[0]
    gram = U @ U.T
    if abs(np.linalg.det(gram)) <= 1e-12 * max(1.0, float(np.max(np.abs(gram)))) ** len(U):
        return None
    coef = np.linalg.solve(gram, np.sum(U ** 2, axis=1) / 2.0)
    offset = coef @ U
    return S[0] + offset, float(np.linalg.norm(offset))


def brute_force_enclosing_radius(points: np.ndarray) -> float:
    """Minimum over circumballs of all subsets of size <= 4 that contain every point."""
    best = math.inf
    n = len(points)
    for size in range(1, min(4, n) + 1):
        for subset in itertools.combinations(range(n), size):
            ball = _circumball(points[list(subset)])
            if ball is None:
                continue
            center, radius = ball
            if radius >= best:
                continue
            if np.all(np.linalg.norm(points - center, axis=1) <= radius * (1.0 + 1e-12) + 1e-15):
                best = radius
    return best


def rigid_motion(rng: np.random.Generator) -> Tuple[np.ndarray, float, np.ndarray]:
    """Random proper rotation, positive scale and translation."""
    R = Rotation.random(random_state=rng).as_matrix()
    scale = float(np.exp(rng.uniform(math.log(0.1), math.log(10.0))))
    shift = rng.uniform(-5.0, 5.0, size=3)
    return R, scale, shift


def apply_motion(points: np.ndarray, motion: Tuple[np.ndarray, float, np.ndarray]) -> np.ndarray:
    R, scale, shift = motion
    return scale * np.asarray(points, dtype=float) @ R.T + shift


def sweep_samples(default: int) -> int:
    """Sample count for slow sweeps, raised through PLANEFORM_SWEEP_SAMPLES."""
    return int(os.environ.get("PLANEFORM_SWEEP_SAMPLES", default))
