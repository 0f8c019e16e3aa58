"""Canonical JSON encoding for scenarios and solutions."""

import json
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np
from pydantic import BaseModel, ValidationError

from ..core.model import (
    InputError,
    PlaybackTask,
    Scenario,
    ScenarioFormatError,
    SegmentationMode,
    Solution,
)
from ..core.tasks import emit_playback_tasks
from ..utils.logging import get_logger


logger = get_logger(__name__)

PathLike = Union[str, Path]

DECIMALS = 6


class AssignmentRecord(BaseModel):
    """One used (data, window) pair, 1-based."""
    i: int
    j: int
    y: float


class FragmentRecord(BaseModel):
    n: int
    dur: float


class TaskRecord(BaseModel):
    m: int
    ts: float
    te: float
    set: List[FragmentRecord] = []


class SolutionFile(BaseModel):
    """Schema of a solution file."""
    objective: int
    x: List[float]
    assignments: List[AssignmentRecord] = []
    tasks: List[TaskRecord] = []


def _number(value: float) -> float:
    rounded = round(float(value), DECIMALS)
    return 0.0 if rounded == 0 else rounded


def canonicalize(payload: Any) -> Any:
    """Round every float to 6 decimals, recursively; key order is kept."""
    if isinstance(payload, dict):
        return {k: canonicalize(v) for k, v in payload.items()}
    if isinstance(payload, (list, tuple)):
        return [canonicalize(v) for v in payload]
    if isinstance(payload, bool):
        return payload
    if isinstance(payload, (int, np.integer)):
        return int(payload)
    if isinstance(payload, (float, np.floating)):
        return _number(payload)
    return payload


def dumps_canonical(payload: Any) -> str:
    return json.dumps(canonicalize(payload), indent=2) + "\n"


def save_json(payload: Any, path: PathLike) -> None:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(dumps_canonical(payload))


def _describe_validation_error(error: ValidationError) -> str:
    parts = []
    for err in error.errors():
        loc = ".".join(str(p) for p in err["loc"]) or "<root>"
        if err["type"] == "missing":
            parts.append(f"missing key '{loc}'")
        else:
            parts.append(f"{loc}: {err['msg']}")
    return "; ".join(parts)


def _parse_json(text: str, source: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioFormatError(
            f"{source}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}"
        ) from e


# --- scenarios ---

def scenario_to_dict(scenario: Scenario) -> Dict[str, Any]:
    return {
        "ld": scenario.ld,
        "data": [
            {"n": t.n, "p": t.p, "os": t.os, "oe": t.oe, "d": t.d} for t in scenario.data
        ],
        "windows": [
            {"m": w.m, "ds": w.ds, "de": w.de, "l": w.l} for w in scenario.windows
        ],
    }


def scenario_from_dict(payload: Any, source: str = "<scenario>") -> Scenario:
    """
    Build a scenario from decoded JSON.

    Raises:
        ScenarioFormatError: On missing keys or broken invariants
    """
    if not isinstance(payload, dict):
        raise ScenarioFormatError(f"{source}: expected a JSON object at top level")
    try:
        return Scenario.model_validate(payload)
    except ValidationError as e:
        raise ScenarioFormatError(f"{source}: {_describe_validation_error(e)}") from e


def dumps_scenario(scenario: Scenario) -> str:
    return dumps_canonical(scenario_to_dict(scenario))


def loads_scenario(text: str, source: str = "<scenario>") -> Scenario:
    return scenario_from_dict(_parse_json(text, source), source)


def save_scenario(scenario: Scenario, path: PathLike) -> None:
    save_json(scenario_to_dict(scenario), path)
    logger.debug(f"Saved scenario with {scenario.n_data} data, {scenario.n_windows} windows to {path}")


def load_scenario(path: PathLike) -> Scenario:
    """
    Load a scenario file.

    Raises:
        FileNotFoundError: If the file is missing
        ScenarioFormatError: If the content is malformed
    """
    source = str(path)
    return loads_scenario(Path(path).read_text(), source)


# --- solutions ---

def tasks_to_list(tasks: List[PlaybackTask]) -> List[Dict[str, Any]]:
    return [
        {
            "m": task.m,
            "ts": task.ts,
            "te": task.te,
            "set": [{"n": n, "dur": dur} for n, dur in task.fragments],
        }
        for task in tasks
    ]


def _binary_or_float(value: float) -> Union[int, float]:
    if value in (0.0, 1.0):
        return int(value)
    return float(value)


def solution_to_dict(
    scenario: Scenario,
    solution: Solution,
    mode: SegmentationMode = SegmentationMode.SG,
) -> Dict[str, Any]:
    """
    Encode a valid solution with its playback tasks.

    Raises:
        InvalidSolutionError: If the solution does not validate
    """
    tasks = emit_playback_tasks(scenario, solution, mode)
    return {
        "objective": solution.objective,
        "x": [_binary_or_float(v) for v in solution.x.tolist()],
        "assignments": [
            {"i": i + 1, "j": j + 1, "y": dur} for i, j, dur in solution.assignments()
        ],
        "tasks": tasks_to_list(tasks),
    }


def solution_from_dict(scenario: Scenario, payload: Any, source: str = "<solution>") -> Solution:
    """
    Decode a solution; g comes from the listed assignments and q from g.

    Raises:
        ScenarioFormatError: On schema errors
        InputError: If the solution does not fit the scenario's dimensions
    """
    try:
        record = SolutionFile.model_validate(payload)
    except ValidationError as e:
        raise ScenarioFormatError(f"{source}: {_describe_validation_error(e)}") from e

    n, m = scenario.n_data, scenario.n_windows
    if len(record.x) != n:
        raise InputError(f"{source}: x has {len(record.x)} entries, scenario has {n} data")

    y = np.zeros((n, m))
    g = np.zeros((n, m))
    for a in record.assignments:
        if not (1 <= a.i <= n and 1 <= a.j <= m):
            raise InputError(f"{source}: assignment ({a.i},{a.j}) outside {n}x{m}")
        y[a.i - 1, a.j - 1] = a.y
        g[a.i - 1, a.j - 1] = 1.0
    q = (g > 0.5).any(axis=0).astype(float) if n else np.zeros(m)
    return Solution(x=np.array(record.x), y=y, g=g, q=q, objective=record.objective)


def save_solution(
    scenario: Scenario,
    solution: Solution,
    path: PathLike,
    mode: SegmentationMode = SegmentationMode.SG,
) -> None:
    save_json(solution_to_dict(scenario, solution, mode), path)


def load_solution(scenario: Scenario, path: PathLike) -> Solution:
    source = str(path)
    return solution_from_dict(scenario, _parse_json(Path(path).read_text(), source), source)
