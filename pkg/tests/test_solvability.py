"""Tests for the plane formation decision oracle."""

import numpy as np
import pytest

from oracles import apply_motion, rigid_motion
from planeform.errors import GeometryError
from planeform.polyhedra import (
    ARCHIMEDEAN,
    PLATONIC,
    cuboctahedron_with_truncated_cube,
    generate_polyhedron,
    prism,
    tetrahedron_with_truncated_tetrahedron,
)
from planeform.solvability import check_solvable
from planeform.symmetry import GroupKind

# Expected adversary of each unsolvable semi-regular solid
UNSOLVABLE_SOLIDS = {
    "cuboctahedron": GroupKind.TETRAHEDRAL,
    "truncated_tetrahedron": GroupKind.TETRAHEDRAL,
    "truncated_cube": GroupKind.OCTAHEDRAL,
    "truncated_octahedron": GroupKind.OCTAHEDRAL,
    "rhombicuboctahedron": GroupKind.OCTAHEDRAL,
    "snub_cube": GroupKind.OCTAHEDRAL,
    "truncated_cuboctahedron": GroupKind.OCTAHEDRAL,
    "truncated_icosahedron": GroupKind.ICOSAHEDRAL,
    "truncated_dodecahedron": GroupKind.ICOSAHEDRAL,
    "rhombicosidodecahedron": GroupKind.ICOSAHEDRAL,
    "snub_dodecahedron": GroupKind.ICOSAHEDRAL,
    "truncated_icosidodecahedron": GroupKind.ICOSAHEDRAL,
}


def test_icosahedron_is_unsolvable():
    verdict = check_solvable(generate_polyhedron("icosahedron"))
    assert not verdict.solvable
    assert verdict.witness is GroupKind.TETRAHEDRAL
    assert verdict.orbit_sizes == (12,)
    assert verdict.summary() == "unsolvable: group I, orbits [12], adversary T"


@pytest.mark.parametrize("name", [name for name in PLATONIC if name != "icosahedron"])
def test_breakable_platonic_solids_are_solvable(name):
    verdict = check_solvable(generate_polyhedron(name))
    assert verdict.solvable
    assert verdict.breakable_index == 0
    assert verdict.witness is None


def test_icosidodecahedron_is_solvable():
    verdict = check_solvable(generate_polyhedron("icosidodecahedron"))
    assert verdict.solvable
    assert verdict.orbit_sizes == (30,)
    assert verdict.summary().startswith("solvable: group I, orbits [30]")


@pytest.mark.parametrize("name", [name for name in ARCHIMEDEAN if name != "icosidodecahedron"])
def test_other_semi_regular_solids_are_unsolvable(name):
    verdict = check_solvable(generate_polyhedron(name))
    assert not verdict.solvable
    assert verdict.witness is UNSOLVABLE_SOLIDS[name]
    assert all(size in (12, 24, 60) for size in verdict.orbit_sizes)


def test_small_sets_are_already_planar():
    verdict = check_solvable([(0, 0, 0), (1, 0, 0), (0, 1, 5)])
    assert verdict.solvable
    assert verdict.reason == "already planar"


def test_robot_at_center_is_solvable():
    points = np.vstack([generate_polyhedron("icosahedron"), [(0.0, 0.0, 0.0)]])
    verdict = check_solvable(points)
    assert verdict.solvable
    assert verdict.reason == "robot at the center"


def test_planar_group_is_solvable():
    verdict = check_solvable(prism(6, 0.7))
    assert verdict.solvable
    assert verdict.reason == "2D rotation group"
    assert verdict.group.label == "D6"


def test_nested_configuration_names_breakable_orbit():
    points = generate_polyhedron("compound", parts=[("truncated_tetrahedron", 1.0), ("tetrahedron", 2.0)])
    verdict = check_solvable(points)
    assert verdict.solvable
    assert verdict.orbit_sizes == (12, 4)
    assert verdict.breakable_index == 1


def test_composite_scenes():
    verdict = check_solvable(tetrahedron_with_truncated_tetrahedron())
    assert verdict.solvable
    assert verdict.orbit_sizes == (4, 12)
    assert verdict.breakable_index == 0

    verdict = check_solvable(cuboctahedron_with_truncated_cube())
    assert not verdict.solvable
    assert verdict.group.kind is GroupKind.OCTAHEDRAL
    assert verdict.orbit_sizes == (12, 24)
    assert verdict.witness is GroupKind.TETRAHEDRAL


def test_witness_follows_smallest_orbit():
    points = generate_polyhedron("compound", parts=[("icosahedron", 1.0), ("truncated_icosahedron", 2.0)])
    verdict = check_solvable(points)
    assert not verdict.solvable
    assert verdict.orbit_sizes == (12, 60)
    assert verdict.witness is GroupKind.TETRAHEDRAL

    generic = generate_polyhedron("orbit", group="O", seed=(0.31, 0.57, 0.93))
    assert check_solvable(generic).witness is GroupKind.OCTAHEDRAL
    generic = generate_polyhedron("orbit", group="I", seed=(0.31, 0.57, 0.93))
    assert check_solvable(generic).witness is GroupKind.ICOSAHEDRAL


def test_verdict_invariant_under_motion(rng):
    for name in ("icosahedron", "cube", "snub_cube"):
        points = generate_polyhedron(name)
        expected = check_solvable(points)
        for _ in range(3):
            moved = check_solvable(apply_motion(points, rigid_motion(rng)))
            assert moved.solvable == expected.solvable
            assert moved.witness == expected.witness
            assert moved.orbit_sizes == expected.orbit_sizes


def test_multiplicity_rejected():
    with pytest.raises(GeometryError, match="multiplicity"):
        check_solvable([(0, 0, 0), (0, 0, 0), (1, 0, 0), (0, 1, 0)])


def test_empty_input_rejected():
    with pytest.raises(GeometryError, match="empty point set"):
        check_solvable([])
