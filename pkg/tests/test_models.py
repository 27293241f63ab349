"""Tests for scenario models."""

import numpy as np
import pytest
from pydantic import ValidationError

from planeform.models import ExplicitFrame, FrameSpec, PointSource, Scenario


def test_generator_source():
    source = PointSource(generator=" Icosahedron ", circumradius=2.0)
    assert source.generator == "icosahedron"
    points = source.build()
    assert points.shape == (12, 3)
    assert np.max(np.linalg.norm(points, axis=1)) == pytest.approx(2.0)


def test_parametric_source():
    source = PointSource(generator="prism", params={"k": 5, "height": 0.5})
    assert len(source.build()) == 10


def test_unknown_generator():
    with pytest.raises(ValidationError) as exc_info:
        PointSource(generator="hypercube")

    assert "unknown generator" in str(exc_info.value)


def test_exactly_one_point_source():
    with pytest.raises(ValidationError):
        PointSource()
    with pytest.raises(ValidationError):
        PointSource(generator="cube", explicit=[(0, 0, 0)])
    with pytest.raises(ValidationError):
        PointSource(explicit=[])
    with pytest.raises(ValidationError):
        PointSource(explicit=[(0, 0, 0)], params={"k": 3})


def test_explicit_frame_validation():
    ExplicitFrame(rotation=((0, -1, 0), (1, 0, 0), (0, 0, 1)), scale=2.0)
    with pytest.raises(ValidationError) as exc_info:
        ExplicitFrame(rotation=((1, 0, 0), (0, 1, 0), (0, 0, -1)))

    assert "right-handed" in str(exc_info.value)
    with pytest.raises(ValidationError):
        ExplicitFrame(rotation=((2, 0, 0), (0, 1, 0), (0, 0, 1)))
    with pytest.raises(ValidationError):
        ExplicitFrame(rotation=((1, 0, 0), (0, 1, 0), (0, 0, 1)), scale=0.0)


def test_frame_spec_modes():
    assert FrameSpec(mode="adversarial", group="t").group == "T"
    with pytest.raises(ValidationError):
        FrameSpec(mode="explicit")
    with pytest.raises(ValidationError):
        FrameSpec(mode="random", group="T")
    with pytest.raises(ValidationError):
        FrameSpec(mode="adversarial", group="D")
    with pytest.raises(ValidationError):
        FrameSpec(seed=-1)


def test_scenario_defaults_follow_settings(isolated_settings):
    scenario = Scenario(points=PointSource(generator="cube"))
    assert scenario.max_cycles == isolated_settings.max_cycles
    assert scenario.algorithm == "plane_formation"
    assert scenario.guard
    assert scenario.frames.mode == "random"


def test_scenario_field_validation():
    source = PointSource(generator="cube")
    with pytest.raises(ValidationError):
        Scenario(points=source, max_cycles=0)
    with pytest.raises(ValidationError):
        Scenario(points=source, tolerance=2.0)
    with pytest.raises(ValidationError):
        Scenario(points=source, algorithm="gather")

    scenario = Scenario(points=source)
    with pytest.raises(ValidationError):
        scenario.max_cycles = 0


def test_tolerance_override():
    scenario = Scenario(points=PointSource(generator="cube"), tolerance=1e-6)
    tol = scenario.tolerance_object()
    assert tol.relative == 1e-6
    assert Scenario(points=PointSource(generator="cube")).tolerance_object().relative == 1e-9


def test_duplicate_points_rejected():
    scenario = Scenario(points=PointSource(explicit=[(0, 0, 0), (1, 0, 0), (1, 0, 0), (0, 1, 1)]))
    with pytest.raises(ValueError, match="not distinct"):
        scenario.build_points()


def test_build_frames():
    random = Scenario(points=PointSource(generator="cube"), frames=FrameSpec(seed=4))
    points = random.build_points()
    assert len(random.build_frames(points)) == 8

    adversarial = Scenario(points=PointSource(generator="icosahedron"), frames=FrameSpec(mode="adversarial"))
    frames = adversarial.build_frames(adversarial.build_points())
    assert len(frames) == 12

    identity = ExplicitFrame(rotation=((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    explicit = Scenario(
        points=PointSource(generator="tetrahedron"),
        frames=FrameSpec(mode="explicit", explicit=[identity] * 3),
    )
    with pytest.raises(ValueError, match="3 frames for 4 points"):
        explicit.build_frames(explicit.build_points())
