"""Command line entry point: analyze, solvable, run, adversary, generate."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
from pydantic import ValidationError

from .adversary import adversarial_run
from .conditions import analyze_configuration
from .config import SETTINGS
from .errors import PlaneformError, ScenarioError
from .formats import (
    SCENARIO_HEADER,
    dump_points,
    dump_trace,
    format_report,
    parse_param,
    parse_points,
    parse_scenario,
)
from .geometry import Tolerance
from .logging import setup_logging
from .models import Scenario
from .polyhedra import GENERATOR_NAMES, generate_polyhedron
from .simulation import resolve_algorithm, run, verify_terminal
from .solvability import check_solvable
from .symmetry import GroupKind

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_INPUT_ERROR = 2


@dataclass
class RunOutcome:
    exit_code: int
    report: str
    trace_text: str
    artifacts: List[Path] = field(default_factory=list)


def _tolerance(relative: Optional[float]) -> Tolerance:
    base = Tolerance.default()
    if relative is None:
        return base
    return Tolerance(relative=relative, absolute=base.absolute, angular=base.angular)


def _read_configuration(path: str) -> np.ndarray:
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith(SCENARIO_HEADER):
        return parse_scenario(text).build_points()
    return parse_points(text)


def _write_artifacts(out_dir: Optional[str], name: str, trace_text: str, report: str) -> List[Path]:
    if out_dir is None:
        return []
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    trace_path = directory / f"{name}.trace"
    report_path = directory / f"{name}.report.txt"
    trace_path.write_text(trace_text, encoding="utf-8")
    report_path.write_text(report, encoding="utf-8")
    return [trace_path, report_path]


def run_scenario(
    scenario: Scenario,
    *,
    name: str = "scenario",
    out_dir: Optional[str] = None,
    workers: Optional[int] = None,
) -> RunOutcome:
    """Run a scenario, verify the terminal configuration and write trace and report."""
    tol = scenario.tolerance_object()
    points = scenario.build_points()
    seed = scenario.frames.seed if scenario.frames.seed is not None else SETTINGS.default_seed

    if scenario.frames.mode == "adversarial":
        kind = GroupKind.from_symbol(scenario.frames.group) if scenario.frames.group else None
        result = adversarial_run(points, scenario.algorithm, scenario.max_cycles, kind, seed, tol)
        trace = result.trace
        report = format_report(trace) + result.summary() + "\n"
        exit_code = EXIT_OK if result.held else EXIT_VERIFICATION_FAILED
    else:
        frames = scenario.build_frames(points)
        algorithm = resolve_algorithm(scenario.algorithm, guard=scenario.guard, tol=tol)
        trace = run(points, frames, algorithm, scenario.max_cycles, tol, workers, scenario.algorithm, seed)
        if trace.error and trace.error.startswith("unsolvable input"):
            # Guarded refusal of an unsolvable start is the expected outcome
            report = format_report(trace) + "verification: EXPECTED (unsolvable input)\n"
            exit_code = EXIT_OK
        else:
            terminal = verify_terminal(trace.final, tol)
            report = format_report(trace, terminal)
            exit_code = EXIT_OK if trace.terminal and terminal.passed else EXIT_VERIFICATION_FAILED

    trace_text = dump_trace(trace)
    artifacts = _write_artifacts(out_dir, name, trace_text, report)
    logger.info(f"Scenario {name} finished with status {trace.status}", extra={"exit_code": exit_code})
    return RunOutcome(exit_code, report, trace_text, artifacts)


def _describe_orbits(sizes: Sequence[int], foldings: Sequence[Optional[int]]) -> str:
    parts = []
    for size, fold in zip(sizes, foldings):
        parts.append(f"{size} (folding {fold})" if fold is not None else str(size))
    return "[" + ", ".join(parts) + "]"


def cmd_analyze(args: argparse.Namespace) -> int:
    tol = _tolerance(args.tol)
    analysis = analyze_configuration(_read_configuration(args.path), tol)
    group = analysis.group
    decomposition = analysis.decomposition
    order = group.order if group.order is not None else "infinite"
    print(f"group: {group.label}, order {order}, orbits: {_describe_orbits(decomposition.sizes, decomposition.foldings)}")
    conditions = analysis.conditions
    print(f"conditions: T1={conditions.t1} T2={conditions.t2} T3={conditions.t3} (phase {conditions.phase})")
    return EXIT_OK


def cmd_solvable(args: argparse.Namespace) -> int:
    verdict = check_solvable(_read_configuration(args.path), _tolerance(args.tol))
    print(verdict.summary())
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    scenario = parse_scenario(Path(args.path).read_text(encoding="utf-8"))
    updates = {}
    if args.max_cycles is not None:
        updates["max_cycles"] = args.max_cycles
    if args.tol is not None:
        updates["tolerance"] = args.tol
    for key, value in updates.items():
        setattr(scenario, key, value)
    if args.seed is not None:
        scenario.frames.seed = args.seed

    outcome = run_scenario(scenario, name=Path(args.path).stem, out_dir=args.out, workers=args.workers)
    print(outcome.report, end="")
    for path in outcome.artifacts:
        print(f"wrote {path}")
    return outcome.exit_code


def cmd_adversary(args: argparse.Namespace) -> int:
    points = _read_configuration(args.path)
    kind = GroupKind.from_symbol(args.group) if args.group else None
    cycles = args.cycles if args.cycles is not None else (args.max_cycles or SETTINGS.max_cycles)
    seed = args.seed if args.seed is not None else SETTINGS.default_seed
    result = adversarial_run(points, args.algorithm, cycles, kind, seed, _tolerance(args.tol))
    print(result.summary())
    _write_artifacts(args.out, Path(args.path).stem, dump_trace(result.trace), format_report(result.trace) + result.summary() + "\n")
    return EXIT_OK if result.held else EXIT_VERIFICATION_FAILED


def _parse_assignments(items: Sequence[str]) -> dict:
    params = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ScenarioError("expected name=value", field=item)
        params[key.strip()] = parse_param(value)
    return params


def cmd_generate(args: argparse.Namespace) -> int:
    points = generate_polyhedron(args.name, args.radius, **_parse_assignments(args.param))
    text = dump_points(points)
    if args.out:
        target = Path(args.out)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")
        print(f"wrote {len(points)} points to {target}")
    else:
        print(text, end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="Relative tolerance override")
    common.add_argument("--seed", type=int, default=None, help="Seed for random or adversarial frames")
    common.add_argument("--max-cycles", type=int, default=None, help="Cycle limit for runs")
    common.add_argument("--out", default=None, help="Output directory (file for generate)")
    common.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ERROR or CRITICAL")

    parser = argparse.ArgumentParser(prog="planeform", description="Plane formation by FSYNC robots in 3D space.")
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", parents=[common], help="Rotation group, orbits and phase of a configuration")
    analyze.add_argument("path", help="Point file or scenario")
    analyze.set_defaults(handler=cmd_analyze)

    solvable = sub.add_parser("solvable", parents=[common], help="Decide whether the robots can form a plane")
    solvable.add_argument("path", help="Point file or scenario")
    solvable.set_defaults(handler=cmd_solvable)

    run_cmd = sub.add_parser("run", parents=[common], help="Run a scenario and verify the result")
    run_cmd.add_argument("path", help="Scenario file")
    run_cmd.add_argument("--workers", type=int, default=None, help="Compute threads per cycle")
    run_cmd.set_defaults(handler=cmd_run)

    adversary = sub.add_parser("adversary", parents=[common], help="Run under symmetric frames of T, O or I")
    adversary.add_argument("path", help="Point file or scenario")
    adversary.add_argument("--cycles", type=int, default=None, help="Number of cycles (default --max-cycles)")
    adversary.add_argument("--group", default=None, help="T, O or I (default by smallest orbit)")
    adversary.add_argument("--algorithm", default="plane_formation", choices=("plane_formation", "go_to_midpoint"))
    adversary.set_defaults(handler=cmd_adversary)

    generate = sub.add_parser("generate", parents=[common], help="Print a canonical point set")
    generate.add_argument("name", choices=GENERATOR_NAMES)
    generate.add_argument("--radius", type=float, default=1.0, help="Circumradius")
    generate.add_argument("--param", action="append", default=[], help="Generator parameter name=value")
    generate.set_defaults(handler=cmd_generate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = getattr(logging, args.log_level.upper(), None) if args.log_level else None
    setup_logging(level)
    try:
        return args.handler(args)
    except (PlaneformError, ValidationError, ValueError, OSError) as e:
        logger.debug("Command failed", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
