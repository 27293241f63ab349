"""Tests for scenario, point and trace files."""

import numpy as np
import pytest

from planeform.errors import ScenarioError
from planeform.formats import (
    dump_points,
    dump_scenario,
    dump_trace,
    format_report,
    load_points,
    load_scenario,
    parse_param,
    parse_points,
    parse_scenario,
)
from planeform.polyhedra import generate_polyhedron
from planeform.simulation import random_frames, resolve_algorithm, run, verify_terminal

SCENARIO = """# planeform scenario v1
points: compound
param parts: octahedron 0.5, cuboctahedron 1, truncated_cube 2
frames: random   # frames are drawn from the seed
seed: 3
algorithm: plane_formation
max_cycles: 12
guard: yes
"""


def test_parse_scenario():
    scenario = parse_scenario(SCENARIO)
    assert scenario.points.generator == "compound"
    assert scenario.points.params["parts"] == [("octahedron", 0.5), ("cuboctahedron", 1), ("truncated_cube", 2)]
    assert scenario.frames.seed == 3
    assert scenario.max_cycles == 12
    assert scenario.guard
    assert len(scenario.build_points()) == 42


def test_explicit_points_and_frames():
    text = "\n".join(
        [
            "# planeform scenario v1",
            "points: explicit",
            "point 1 0 0",
            "point 0 1 0",
            "point 0 0 1",
            "point -1 -1 -1",
            "frames: explicit",
        ]
        + ["frame 1 0 0 0 1 0 0 0 1 2.5"] * 4
        + ["guard: no"]
    )
    scenario = parse_scenario(text)
    points = scenario.build_points()
    assert points.shape == (4, 3)
    frames = scenario.build_frames(points)
    assert frames[0].scale == 2.5
    assert not scenario.guard


def test_scenario_round_trip():
    scenario = parse_scenario(SCENARIO.replace("max_cycles: 12", "max_cycles: 12\ntolerance: 1e-8"))
    assert parse_scenario(dump_scenario(scenario)) == scenario


def test_missing_header():
    with pytest.raises(ScenarioError) as exc_info:
        parse_scenario("points: cube\n")

    assert exc_info.value.line == 1


def test_unknown_key_reports_line_and_field():
    with pytest.raises(ScenarioError) as exc_info:
        parse_scenario("# planeform scenario v1\npoints: cube\ncolour: red\n")

    assert exc_info.value.line == 3
    assert exc_info.value.field == "colour"
    assert "line 3" in str(exc_info.value)


def test_duplicate_key():
    with pytest.raises(ScenarioError, match="duplicate key"):
        parse_scenario("# planeform scenario v1\npoints: cube\npoints: octahedron\n")


def test_bad_values_point_at_their_line():
    with pytest.raises(ScenarioError) as exc_info:
        parse_scenario("# planeform scenario v1\npoints: cube\nmax_cycles: 0\n")
    assert exc_info.value.line == 3
    assert exc_info.value.field == "max_cycles"

    with pytest.raises(ScenarioError) as exc_info:
        parse_scenario("# planeform scenario v1\npoints: cube\nguard: maybe\n")
    assert exc_info.value.field == "guard"

    with pytest.raises(ScenarioError) as exc_info:
        parse_scenario("# planeform scenario v1\npoints: explicit\npoint 1 2\n")
    assert exc_info.value.line == 3


def test_unknown_generator_maps_to_points_line():
    with pytest.raises(ScenarioError) as exc_info:
        parse_scenario("# planeform scenario v1\nseed: 1\npoints: hypercube\n")

    assert exc_info.value.line == 3
    assert exc_info.value.field.startswith("points")


def test_missing_points_key():
    with pytest.raises(ScenarioError, match="missing key"):
        parse_scenario("# planeform scenario v1\nseed: 1\n")


def test_parse_param():
    assert parse_param("5") == 5
    assert parse_param("0.5") == 0.5
    assert parse_param("T") == "T"
    assert parse_param("0.31, 0.57, 0.93") == [0.31, 0.57, 0.93]
    assert parse_param("cube 1, octahedron 2") == [("cube", 1), ("octahedron", 2)]


def test_parse_points():
    text = "# cube corners\n1 1 1\n\npoint -1 -1 1  # prefixed\n1 -1 -1\n-1 1 -1\n"
    points = parse_points(text)
    assert points.shape == (4, 3)
    assert np.allclose(points[1], (-1, -1, 1))
    with pytest.raises(ScenarioError) as exc_info:
        parse_points("1 1 1\n1 1\n")
    assert exc_info.value.line == 2
    with pytest.raises(ScenarioError, match="no points found"):
        parse_points("# nothing\n")


def test_points_file_is_exact(tmp_path):
    points = generate_polyhedron("snub_cube")
    path = tmp_path / "snub.txt"
    path.write_text(dump_points(points), encoding="utf-8")
    assert np.array_equal(load_points(path), points)


def test_load_scenario(tmp_path):
    path = tmp_path / "nested.scenario"
    path.write_text(SCENARIO, encoding="utf-8")
    assert load_scenario(path).frames.seed == 3


def _cube_trace():
    points = generate_polyhedron("cube")
    return run(points, random_frames(points, seed=6), resolve_algorithm("plane_formation"), 10, seed=6)


def test_trace_text_is_deterministic():
    first = dump_trace(_cube_trace())
    assert first == dump_trace(_cube_trace())
    lines = first.splitlines()
    assert lines[0] == "# planeform trace v1"
    assert lines[1] == "n: 8"
    assert lines[3] == "seed: 6"
    assert lines[4] == "cycle 0"
    assert "group: O" in lines
    assert "conditions: true false false" in lines
    assert lines[-1] == "status: terminal"


def test_report_lists_cycles_and_verification():
    trace = _cube_trace()
    report = format_report(trace, verify_terminal(trace.final))
    lines = report.splitlines()
    assert "status: terminal" in lines
    assert "cycle 0: group O, phase break" in lines
    assert lines[-1] == "verification: PASS"
