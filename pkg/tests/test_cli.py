"""Tests for the planeform command line."""

import logging
from pathlib import Path

import pytest

from planeform import simulation
from planeform.cli import EXIT_INPUT_ERROR, EXIT_OK, EXIT_VERIFICATION_FAILED, main
from planeform.errors import FormationError
from planeform.formats import dump_points
from planeform.polyhedra import generate_polyhedron

SCENARIO_DIR = Path(__file__).resolve().parents[1] / "scenarios"


@pytest.fixture(autouse=True)
def restore_root_logger():
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


@pytest.fixture
def point_file(tmp_path):
    def write(name, **params):
        path = tmp_path / f"{name}.txt"
        path.write_text(dump_points(generate_polyhedron(name, **params)), encoding="utf-8")
        return str(path)

    return write


def _scenario(tmp_path, body, name="scenario"):
    path = tmp_path / f"{name}.scenario"
    path.write_text("# planeform scenario v1\n" + body, encoding="utf-8")
    return str(path)


def test_generate_prints_points(capsys):
    assert main(["generate", "icosahedron"]) == EXIT_OK
    rows = capsys.readouterr().out.splitlines()
    assert len(rows) == 12
    assert all(len(row.split()) == 3 for row in rows)


def test_generate_with_parameters(tmp_path, capsys):
    target = tmp_path / "sets" / "prism.txt"
    code = main(["generate", "prism", "--param", "k=5", "--param", "height=0.5", "--out", str(target)])
    assert code == EXIT_OK
    assert "wrote 10 points" in capsys.readouterr().out
    assert len(target.read_text(encoding="utf-8").splitlines()) == 10


def test_solvable_icosahedron(point_file, capsys):
    assert main(["solvable", point_file("icosahedron")]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "unsolvable: group I, orbits [12], adversary T"


def test_analyze_cube(point_file, capsys):
    assert main(["analyze", point_file("cube")]) == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "group: O, order 24, orbits: [8 (folding 3)]"
    assert out[1] == "conditions: T1=True T2=False T3=False (phase break)"


def test_analyze_reads_scenarios(tmp_path, capsys):
    path = _scenario(tmp_path, "points: prism\nparam k: 6\nparam height: 0.7\n")
    assert main(["analyze", path]) == EXIT_OK
    assert capsys.readouterr().out.startswith("group: D6, order 12")


def test_run_writes_trace_and_report(tmp_path, capsys):
    path = _scenario(tmp_path, "points: dodecahedron\nseed: 2\n", name="dodeca")
    out_dir = tmp_path / "out"
    assert main(["run", path, "--out", str(out_dir)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "verification: PASS" in out
    assert (out_dir / "dodeca.trace").read_text(encoding="utf-8").startswith("# planeform trace v1")
    assert (out_dir / "dodeca.report.txt").exists()


def test_run_overrides(tmp_path, capsys):
    path = _scenario(tmp_path, "points: cube\n")
    assert main(["run", path, "--seed", "9", "--max-cycles", "1"]) == 1
    out = capsys.readouterr().out
    assert "status: max_cycles" in out
    assert "verification: FAIL" in out


def test_guarded_run_on_unsolvable_input(tmp_path, capsys):
    path = _scenario(tmp_path, "points: icosahedron\n")
    assert main(["run", path]) == EXIT_OK
    assert "verification: EXPECTED (unsolvable input)" in capsys.readouterr().out


def test_adversary_command(point_file, capsys):
    assert main(["adversary", point_file("icosahedron"), "--cycles", "3", "--seed", "1"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "γ ⊇ T for 3 cycles; never planar"


def test_adversary_on_solvable_input_fails(point_file, capsys):
    assert main(["adversary", point_file("cube"), "--cycles", "2"]) == EXIT_INPUT_ERROR
    assert "no adversary exists" in capsys.readouterr().err


def test_halted_adversary_run_fails(point_file, monkeypatch, capsys):
    def give_up(local, self):
        raise FormationError("rule gave up")

    monkeypatch.setitem(simulation.ALGORITHMS, "plane_formation", lambda **options: give_up)
    assert main(["adversary", point_file("icosahedron"), "--cycles", "4"]) == EXIT_VERIFICATION_FAILED
    assert capsys.readouterr().out.strip() == "halted after 0 of 4 cycles: rule gave up"


def test_bad_scenario_reports_line(tmp_path, capsys):
    path = _scenario(tmp_path, "points: cube\nmax_cycles: many\n")
    assert main(["run", path]) == EXIT_INPUT_ERROR
    assert "line 3" in capsys.readouterr().err


def test_missing_file(tmp_path, capsys):
    assert main(["solvable", str(tmp_path / "absent.txt")]) == EXIT_INPUT_ERROR
    assert capsys.readouterr().err.startswith("error:")


def test_unknown_generator_is_a_usage_error():
    with pytest.raises(SystemExit):
        main(["generate", "hypercube"])


@pytest.mark.parametrize("path", sorted(SCENARIO_DIR.glob("*.scenario")), ids=lambda p: p.stem)
def test_bundled_scenarios_pass(path, tmp_path, capsys):
    assert main(["run", str(path), "--out", str(tmp_path)]) == EXIT_OK
    assert (tmp_path / f"{path.stem}.trace").exists()
