"""Line-oriented scenario, point and trace files.

Scenario files::

    # planeform scenario v1
    points: icosahedron          (generator name, or "explicit")
    circumradius: 1
    param k: 5                   (generator parameter, repeatable)
    point 1 0 0                  (explicit rows)
    frames: random | adversarial | explicit
    seed: 3
    group: T
    frame r00 r01 r02 r10 r11 r12 r20 r21 r22 scale
    algorithm: plane_formation
    max_cycles: 10
    tolerance: 1e-9
    guard: yes
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from pydantic import ValidationError

from .errors import ScenarioError
from .geometry import PointsLike, as_points
from .models import Scenario
from .simulation import TerminalReport, Trace

logger = logging.getLogger(__name__)

SCENARIO_HEADER = "# planeform scenario v1"
TRACE_HEADER = "# planeform trace v1"

_SCALAR_KEYS = ("points", "circumradius", "frames", "seed", "group", "algorithm", "max_cycles", "tolerance", "guard")


def _number(text: str) -> Union[int, float]:
    try:
        return int(text)
    except ValueError:
        return float(text)


def _format_number(value: Union[int, float]) -> str:
    if isinstance(value, (bool, np.bool_)):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def parse_param(text: str) -> Any:
    """Scalar, comma-separated numbers, or comma-separated "name radius" pairs."""
    items = [item.strip() for item in text.split(",")]
    if len(items) == 1 and len(items[0].split()) == 1:
        try:
            return _number(items[0])
        except ValueError:
            return items[0]
    try:
        return [_number(item) for item in items]
    except ValueError:
        pass
    pairs = []
    for item in items:
        name, radius = item.split()
        pairs.append((name, _number(radius)))
    return pairs


def _format_param(value: Any) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (list, tuple)):
        if value and isinstance(value[0], (list, tuple)):
            return ", ".join(f"{name} {_format_number(radius)}" for name, radius in value)
        return ", ".join(_format_number(v) for v in value)
    return _format_number(value)


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("yes", "true", "1", "on"):
        return True
    if lowered in ("no", "false", "0", "off"):
        return False
    raise ValueError(f"expected yes or no, got {text!r}")


def _floats(fields: List[str], count: int) -> List[float]:
    if len(fields) != count:
        raise ValueError(f"expected {count} numbers, got {len(fields)}")
    return [float(f) for f in fields]


def parse_scenario(text: str) -> Scenario:
    """Parse a scenario file, reporting the offending line and field on failure."""
    lines = text.splitlines()
    if not lines or lines[0].strip() != SCENARIO_HEADER:
        raise ScenarioError(f"missing header {SCENARIO_HEADER!r}", line=1)

    scalars: Dict[str, Tuple[str, int]] = {}
    params: Dict[str, Any] = {}
    points: List[List[float]] = []
    frames: List[Dict[str, Any]] = []
    for number, raw in enumerate(lines[1:], start=2):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if line.startswith("point "):
                points.append(_floats(line.split()[1:], 3))
            elif line.startswith("frame "):
                values = _floats(line.split()[1:], 10)
                frames.append({"rotation": [values[0:3], values[3:6], values[6:9]], "scale": values[9]})
            elif line.startswith("param "):
                key, _, value = line[len("param "):].partition(":")
                if not key.strip() or not value.strip():
                    raise ValueError("expected 'param name: value'")
                params[key.strip()] = parse_param(value)
            else:
                key, sep, value = line.partition(":")
                key = key.strip()
                if not sep or key not in _SCALAR_KEYS:
                    raise ScenarioError(f"unknown key {key!r}", line=number, field=key)
                if key in scalars:
                    raise ScenarioError("duplicate key", line=number, field=key)
                scalars[key] = (value.strip(), number)
        except ValueError as e:
            raise ScenarioError(str(e), line=number) from None

    def scalar(key: str, convert=str) -> Optional[Any]:
        if key not in scalars:
            return None
        value, number = scalars[key]
        try:
            return convert(value)
        except ValueError as e:
            raise ScenarioError(str(e), line=number, field=key) from None

    source = scalar("points")
    if source is None:
        raise ScenarioError("missing key", field="points")
    point_source: Dict[str, Any] = {}
    if source == "explicit":
        point_source["explicit"] = points
    else:
        point_source["generator"] = source
        if points:
            raise ScenarioError("point rows need 'points: explicit'", field="points")
    if params:
        point_source["params"] = params
    if "circumradius" in scalars:
        point_source["circumradius"] = scalar("circumradius", float)

    frame_spec: Dict[str, Any] = {}
    for key, convert in (("frames", str), ("seed", int), ("group", str)):
        if key in scalars:
            frame_spec["mode" if key == "frames" else key] = scalar(key, convert)
    if frames:
        frame_spec["explicit"] = frames

    data: Dict[str, Any] = {"points": point_source, "frames": frame_spec}
    for key, convert in (("algorithm", str), ("max_cycles", int), ("tolerance", float), ("guard", _parse_bool)):
        if key in scalars:
            data[key] = scalar(key, convert)

    try:
        return Scenario.model_validate(data)
    except ValidationError as e:
        error = e.errors()[0]
        location = ".".join(str(part) for part in error["loc"])
        top = str(error["loc"][0]) if error["loc"] else None
        line = scalars[top][1] if top in scalars else None
        raise ScenarioError(error["msg"], line=line, field=location or None) from None


def load_scenario(path: Union[str, Path]) -> Scenario:
    return parse_scenario(Path(path).read_text(encoding="utf-8"))


def dump_scenario(scenario: Scenario) -> str:
    """Normalized scenario text; parse_scenario(dump_scenario(s)) == s."""
    source = scenario.points
    out = [SCENARIO_HEADER]
    out.append(f"points: {source.generator if source.generator else 'explicit'}")
    if source.generator:
        out.append(f"circumradius: {_format_number(source.circumradius)}")
    for key in sorted(source.params):
        out.append(f"param {key}: {_format_param(source.params[key])}")
    for row in source.explicit or ():
        out.append("point " + " ".join(_format_number(float(v)) for v in row))

    frames = scenario.frames
    out.append(f"frames: {frames.mode}")
    if frames.seed is not None:
        out.append(f"seed: {frames.seed}")
    if frames.group is not None:
        out.append(f"group: {frames.group}")
    for frame in frames.explicit or ():
        values = [v for row in frame.rotation for v in row] + [frame.scale]
        out.append("frame " + " ".join(_format_number(float(v)) for v in values))

    out.append(f"algorithm: {scenario.algorithm}")
    out.append(f"max_cycles: {scenario.max_cycles}")
    if scenario.tolerance is not None:
        out.append(f"tolerance: {_format_number(scenario.tolerance)}")
    out.append(f"guard: {'yes' if scenario.guard else 'no'}")
    return "\n".join(out) + "\n"


def parse_points(text: str) -> np.ndarray:
    """Plain "x y z" rows; blank lines, comments and a "point" prefix are accepted."""
    rows = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if fields[0] == "point":
            fields = fields[1:]
        try:
            rows.append(_floats(fields, 3))
        except ValueError as e:
            raise ScenarioError(str(e), line=number) from None
    if not rows:
        raise ScenarioError("no points found")
    return as_points(rows)


def load_points(path: Union[str, Path]) -> np.ndarray:
    return parse_points(Path(path).read_text(encoding="utf-8"))


def dump_points(points: PointsLike) -> str:
    return "".join(" ".join(_format_number(float(v)) for v in row) + "\n" for row in as_points(points))


def dump_trace(trace: Trace) -> str:
    """Versioned trace text; identical traces give byte-identical output."""
    out = [TRACE_HEADER, f"n: {trace.n}", f"algorithm: {trace.algorithm}", f"seed: {trace.seed if trace.seed is not None else 'none'}"]
    for entry in trace.entries:
        out.append(f"cycle {entry.cycle}")
        for i, row in enumerate(entry.positions):
            out.append(f"{i} " + " ".join(_format_number(float(v)) for v in row))
        out.append(f"group: {entry.group.label if entry.group is not None else 'unknown'}")
        if entry.conditions is None:
            out.append("conditions: unknown")
        else:
            out.append("conditions: " + " ".join("true" if c else "false" for c in entry.conditions.as_tuple()))
        out.append(f"multiplicity: {'yes' if entry.multiplicity else 'no'}")
    out.append(f"status: {trace.status}")
    if trace.error:
        out.append(f"error: {trace.error}")
    return "\n".join(out) + "\n"


def format_report(trace: Trace, report: Optional[TerminalReport] = None) -> str:
    """Human-readable run summary: group and phase per cycle, then terminal checks."""
    out = [f"algorithm: {trace.algorithm}", f"robots: {trace.n}", f"status: {trace.status}", f"cycles: {trace.cycles}"]
    if trace.error:
        out.append(f"error: {trace.error}")
    for entry in trace.entries:
        group = entry.group.label if entry.group is not None else "unknown"
        phase = entry.conditions.phase if entry.conditions is not None else "unknown"
        flag = " (multiplicity)" if entry.multiplicity else ""
        out.append(f"cycle {entry.cycle}: group {group}, phase {phase}{flag}")
    if report is not None:
        out.extend(report.lines())
        out.append(f"verification: {'PASS' if report.passed and trace.terminal else 'FAIL'}")
    return "\n".join(out) + "\n"
