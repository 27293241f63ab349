"""Tests for symmetric frame construction and adversarial runs."""

import itertools

import numpy as np
import pytest
from scipy.spatial import cKDTree

from planeform.adversary import (
    adversarial_run,
    adversary_group,
    build_symmetric_frames,
    plan_adversary,
    symmetry_residual,
)
from planeform.errors import AdversaryError, FormationError
from planeform.polyhedra import cuboctahedron_with_truncated_cube, generate_polyhedron, group_elements
from planeform.symmetry import GroupKind


def _same_set(a, b, atol=1e-9):
    dist, _ = cKDTree(b).query(a)
    return float(dist.max()) <= atol


def test_icosahedron_adversary_is_tetrahedral():
    plan = plan_adversary(generate_polyhedron("icosahedron"))
    assert plan.group_kind is GroupKind.TETRAHEDRAL
    assert len(plan.embedding) == 12
    assert [len(orbit) for orbit in plan.orbits] == [12]
    assert sorted(plan.assignment) == list(range(12))


def test_symmetric_robots_see_the_same_observation():
    points = generate_polyhedron("icosahedron")
    frames = build_symmetric_frames(points, "T", seed=3)
    reference = frames[0].observe(points)
    for frame in frames[1:]:
        assert _same_set(frame.observe(points), reference)


def test_frames_sit_on_robots_and_share_orbit_scale():
    points = cuboctahedron_with_truncated_cube()
    plan = plan_adversary(points, seed=8)
    frames = plan.frames()
    assert len(plan.orbits) == 3
    for frame, p in zip(frames, points):
        assert np.allclose(frame.origin, p)
        assert np.linalg.det(frame.rotation) == pytest.approx(1.0)
    for orbit in plan.orbits:
        assert len({frames[j].scale for j in orbit}) == 1


def test_same_seed_same_frames():
    points = generate_polyhedron("icosahedron")
    a = build_symmetric_frames(points, GroupKind.TETRAHEDRAL, seed=5)
    b = build_symmetric_frames(points, GroupKind.TETRAHEDRAL, seed=5)
    assert all(np.allclose(x.rotation, y.rotation) for x, y in zip(a, b))


def test_solvable_input_has_no_adversary():
    with pytest.raises(AdversaryError, match="no adversary exists"):
        adversary_group(generate_polyhedron("cube"))


def test_group_must_embed():
    with pytest.raises(AdversaryError, match="does not embed"):
        plan_adversary(generate_polyhedron("icosahedron"), GroupKind.OCTAHEDRAL)


def test_folded_orbits_rejected():
    with pytest.raises(AdversaryError, match="folding > 1"):
        plan_adversary(generate_polyhedron("cuboctahedron"), GroupKind.OCTAHEDRAL)


def test_planar_groups_rejected():
    with pytest.raises(AdversaryError):
        plan_adversary(generate_polyhedron("icosahedron"), GroupKind.CYCLIC)


def test_symmetry_residual():
    points = generate_polyhedron("icosahedron")
    tetrahedral = group_elements(GroupKind.TETRAHEDRAL)
    assert symmetry_residual(points, tetrahedral, (0, 0, 0)) <= 1e-12
    bent = points.copy()
    bent[0] += (0.0, 0.0, 0.01)
    assert symmetry_residual(bent, tetrahedral, (0, 0, 0)) > 1e-3


def test_icosahedron_never_becomes_planar():
    report = adversarial_run(generate_polyhedron("icosahedron"), "plane_formation", cycles=5, seed=2)
    assert report.closed
    assert not report.ever_planar
    assert report.cycles == 5
    assert report.held
    assert report.summary() == "γ ⊇ T for 5 cycles; never planar"


def test_outer_orbits_stay_put_under_adversary():
    points = generate_polyhedron("compound", parts=[("icosahedron", 1.0), ("truncated_icosahedron", 2.0)])
    report = adversarial_run(points, "plane_formation", cycles=3)
    assert report.group_kind is GroupKind.TETRAHEDRAL
    assert report.closed
    assert not report.ever_planar
    assert np.allclose(report.trace.final[12:], points[12:])


def test_octahedral_adversary_on_snub_cube():
    report = adversarial_run(generate_polyhedron("snub_cube"), "plane_formation", cycles=3)
    assert report.group_kind is GroupKind.OCTAHEDRAL
    assert report.closed
    assert not report.ever_planar


def test_midpoint_step_keeps_icosahedron_symmetric():
    report = adversarial_run(generate_polyhedron("icosahedron"), "go_to_midpoint", cycles=3, seed=4)
    assert report.closed
    assert not report.ever_planar
    moved = report.trace.entries[1].positions
    assert not _same_set(moved, generate_polyhedron("icosahedron"))


def test_any_rule_stays_symmetric_under_adversary():
    points = generate_polyhedron("icosahedron")

    def halfway_to_first(local, self):
        others = np.delete(local, self, axis=0)
        return others[0] / 2.0

    report = adversarial_run(points, halfway_to_first, cycles=2, seed=1)
    assert report.trace.algorithm == "custom"
    assert report.closed
    assert not _same_set(report.trace.entries[1].positions, points)


def _fails_after(calls):
    counter = itertools.count()

    def rule(local, self):
        if next(counter) >= calls:
            raise FormationError("rule gave up")
        others = np.delete(local, self, axis=0)
        return others[0] / 2.0

    return rule


def test_halted_run_is_not_success():
    report = adversarial_run(generate_polyhedron("icosahedron"), _fails_after(12), cycles=5, seed=1)
    assert report.halted
    assert report.cycles == 1
    assert report.requested_cycles == 5
    assert not report.closed
    assert not report.held
    assert report.summary() == "halted after 1 of 5 cycles: rule gave up"


@pytest.mark.slow
@pytest.mark.parametrize("algorithm", ["plane_formation", "go_to_midpoint"])
@pytest.mark.parametrize(
    "points",
    [
        generate_polyhedron("icosahedron"),
        generate_polyhedron("orbit", group="O", seed=(0.31, 0.57, 0.93)),
        cuboctahedron_with_truncated_cube(),
    ],
    ids=["icosahedron", "octahedral_orbit", "cuboctahedron_with_truncated_cube"],
)
def test_adversary_holds_for_fifty_cycles(points, algorithm):
    report = adversarial_run(points, algorithm, cycles=50, seed=7)
    assert not report.halted, report.trace.error
    assert report.closed
    assert not report.ever_planar
    assert report.cycles == 50
    assert report.held
