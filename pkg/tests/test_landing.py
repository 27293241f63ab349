"""Tests for plane selection and landing."""

import math

import numpy as np
import pytest

from oracles import apply_motion, rigid_motion
from planeform.conditions import analyze_configuration
from planeform.errors import FormationError
from planeform.geometry import is_collinear, is_coplanar, min_pairwise_distance
from planeform.landing import land, landing_points, select_destination, select_plane
from planeform.polyhedra import bipyramid, generate_polyhedron, prism, sphenoid


def _land_all(points):
    return np.array([land(points, i) for i in range(len(points))])


def _assert_terminal(moved):
    assert is_coplanar(moved)
    assert not is_collinear(moved)
    assert min_pairwise_distance(moved) > 1e-9


def test_prism_plane_is_orthogonal_to_principal_axis():
    plane = select_plane(prism(5, 1.0))
    assert abs(plane.normal[2]) == pytest.approx(1.0)
    assert plane.offset == pytest.approx(0.0, abs=1e-12)


def test_plane_passes_through_center():
    points = bipyramid(4, 1.0, 2.0)
    plane = select_plane(points)
    assert np.allclose(plane.origin, (0.0, 0.0, -0.5), atol=1e-12)


def test_select_plane_rejects_planar_and_wrong_phase():
    with pytest.raises(FormationError, match="already planar"):
        select_plane([(1, 0, 0), (0, 1, 0), (-1, 0, 0), (0, -1, 0)])
    with pytest.raises(FormationError, match="wrong phase"):
        select_plane(generate_polyhedron("dodecahedron"))


@pytest.mark.parametrize("points", [prism(3, 2.0), sphenoid(1.0, 2.0, 3.0)], ids=["prism", "sphenoid"])
def test_plane_choice_is_frame_independent(points, rng):
    plane = select_plane(points)
    for _ in range(3):
        motion = rigid_motion(rng)
        R, scale, shift = motion
        moved = select_plane(apply_motion(points, motion))
        assert abs(float(np.dot(moved.normal, R @ plane.normal))) == pytest.approx(1.0)
        center = apply_motion(plane.origin[None, :], motion)
        assert moved.signed_distance(center)[0] == pytest.approx(0.0, abs=1e-9 * scale)


def test_generic_plane_is_frame_independent(rng):
    points = rng.normal(size=(6, 3))
    plane = select_plane(points)
    motion = rigid_motion(rng)
    moved = select_plane(apply_motion(points, motion))
    assert abs(float(np.dot(moved.normal, motion[0] @ plane.normal))) == pytest.approx(1.0)


def test_sphenoid_lands_on_rectangle():
    points = sphenoid(1.0, 2.0, 3.0)
    moved = _land_all(points)
    expected = points.copy()
    expected[:, 0] = 0.0
    assert np.allclose(moved, expected, atol=1e-12)
    _assert_terminal(moved)


def test_pyramid_apex_lands_on_center():
    points = generate_polyhedron("pyramid", k=4)
    moved = _land_all(points)
    assert np.allclose(moved[:4], points[:4])
    assert np.allclose(moved[4], (0.0, 0.0, 0.0), atol=1e-12)
    _assert_terminal(moved)


def test_robot_on_plane_stays():
    points = generate_polyhedron("pyramid", k=4)
    plane = select_plane(points)
    for i in range(4):
        assert np.allclose(select_destination(points, plane, i), points[i])


def test_prism_mirror_pairs_rotate_apart():
    points = prism(4, 1.0)
    offset = math.sqrt(2.0) / 4.0
    assert np.allclose(land(points, 0), (1.0, offset, 0.0), atol=1e-12)
    assert np.allclose(land(points, 4), (1.0, -offset, 0.0), atol=1e-12)
    assert np.allclose(land(points, 1), (-offset, 1.0, 0.0), atol=1e-12)
    _assert_terminal(_land_all(points))


def test_landing_is_frame_equivariant(rng):
    points = prism(4, 1.0)
    expected = _land_all(points)
    for _ in range(3):
        motion = rigid_motion(rng)
        moved = _land_all(apply_motion(points, motion))
        assert np.allclose(moved, apply_motion(expected, motion), atol=1e-9 * motion[1])


def test_bipyramid_apexes_land_apart():
    points = bipyramid(4, 1.0, 2.0)
    center = np.array([0.0, 0.0, -0.5])
    moved = _land_all(points)
    assert np.allclose(moved[:, 2], -0.5)
    radii = sorted(float(r) for r in np.linalg.norm(moved - center, axis=1))
    assert radii[0] == pytest.approx(0.0, abs=1e-12)
    assert radii[1] == pytest.approx(0.25)
    assert radii[2:] == pytest.approx([1.0] * 4)
    _assert_terminal(moved)


def test_generic_configuration_lands(rng):
    for _ in range(5):
        points = rng.normal(size=(7, 3))
        moved = _land_all(points)
        _assert_terminal(moved)
        plane = select_plane(points)
        assert np.all(np.abs(plane.signed_distance(moved)) <= 1e-9)


def test_landing_points_match_per_robot_calls():
    points = prism(6, 0.5)
    analysis = analyze_configuration(points)
    plane = select_plane(points)
    batch = landing_points(analysis, plane)
    for i in range(len(points)):
        assert np.allclose(batch[i], select_destination(points, plane, i))


def test_land_keeps_planar_configuration():
    square = [(1, 0, 0), (0, 1, 0), (-1, 0, 0), (0, -1, 0)]
    assert np.allclose(land(square, 2), (-1, 0, 0))


def test_land_wrong_phase():
    with pytest.raises(FormationError, match="wrong phase"):
        land(generate_polyhedron("icosahedron"), 0)
