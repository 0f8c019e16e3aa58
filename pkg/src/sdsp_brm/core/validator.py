"""Constraint validation for SDSP-BRM solutions against the full model."""

from typing import List, Tuple

import numpy as np

from .model import (
    TOLERANCE,
    InputError,
    InvalidSolutionError,
    Scenario,
    SegmentationMode,
    Solution,
    Violation,
    compute_service_matrix,
    evaluate_objective,
)


def _is_binary(values: np.ndarray) -> np.ndarray:
    return (np.abs(values) <= TOLERANCE) | (np.abs(values - 1.0) <= TOLERANCE)


def _pairs(mask: np.ndarray) -> List[Tuple[int, int]]:
    rows, cols = np.nonzero(mask)
    return list(zip(rows.tolist(), cols.tolist()))


def validate_solution(
    scenario: Scenario,
    solution: Solution,
    mode: SegmentationMode = SegmentationMode.SG,
) -> List[Violation]:
    """
    Check a solution against every model constraint.

    Each check is reported independently, so one bad variable may show up
    under several constraints. Indices in the returned violations are 1-based.

    Args:
        scenario: Scenario the solution claims to solve
        solution: Candidate solution
        mode: SG, or NonSG for the single-window restriction

    Returns:
        List of violations; empty means the solution is valid

    Raises:
        InputError: If the solution dimensions don't match the scenario
    """
    n, m = scenario.n_data, scenario.n_windows
    if solution.shape != (n, m):
        raise InputError(
            f"solution is {solution.shape[0]}x{solution.shape[1]}, scenario is {n}x{m}"
        )

    violations: List[Violation] = []
    x, y, g, q = solution.x, solution.y, solution.g, solution.q
    d = scenario.durations()
    caps = scenario.capacities()
    ld = scenario.ld
    r = compute_service_matrix(scenario).r

    if n and m:
        lo = g * ld
        hi = g * d[:, np.newaxis]
        for i, j in _pairs((y < lo - TOLERANCE) | (y > hi + TOLERANCE)):
            violations.append(Violation(
                "6", (i + 1, j + 1),
                f"y={y[i, j]:.6f} outside [g*ld, g*d] = [{lo[i, j]:.6f}, {hi[i, j]:.6f}]",
            ))
        for i, j in _pairs(g > r + TOLERANCE):
            violations.append(Violation(
                "9", (i + 1, j + 1), f"window {j + 1} cannot serve data {i + 1} (r=0)",
            ))
        for i, j in _pairs(g > x[:, np.newaxis] + TOLERANCE):
            violations.append(Violation(
                "10", (i + 1, j + 1), f"g={g[i, j]:g} while x={x[i]:g}",
            ))
        for i, j in _pairs(y < -TOLERANCE):
            violations.append(Violation("11", (i + 1, j + 1), f"negative y={y[i, j]:.6f}"))

    row_sums = y.sum(axis=1) if n else np.zeros(0)
    for i in range(n):
        if abs(row_sums[i] - x[i] * d[i]) > TOLERANCE:
            violations.append(Violation(
                "7", (i + 1,),
                f"fragments sum to {row_sums[i]:.6f}, expected x*d = {x[i] * d[i]:.6f}",
            ))

    col_sums = y.sum(axis=0) if m else np.zeros(0)
    for j in range(m):
        if col_sums[j] > caps[j] + TOLERANCE:
            violations.append(Violation(
                "8", (j + 1,),
                f"window load {col_sums[j]:.6f} exceeds capacity {caps[j]:.6f}",
            ))

    for i, j in _pairs(~_is_binary(g)):
        violations.append(Violation("12", (i + 1, j + 1), f"g={g[i, j]} not binary"))
    for i in np.flatnonzero(~_is_binary(x)):
        violations.append(Violation("13", (int(i) + 1,), f"x={x[i]} not binary"))

    used = (g > 0.5).any(axis=0) if n else np.zeros(m, dtype=bool)
    for j in range(m):
        if (q[j] > 0.5) != bool(used[j]):
            violations.append(Violation(
                "q", (j + 1,), f"q={q[j]:g} but window {'is' if used[j] else 'is not'} used",
            ))

    if mode == SegmentationMode.NONSG:
        per_data = g.sum(axis=1) if n else np.zeros(0)
        for i in range(n):
            if per_data[i] > 1 + TOLERANCE:
                violations.append(Violation(
                    "nonsg", (i + 1,), f"data split across {per_data[i]:g} windows",
                ))

    expected = evaluate_objective(scenario, solution)
    if solution.objective != expected:
        violations.append(Violation(
            "objective", (), f"stored {solution.objective}, recomputed {expected}",
        ))

    return violations


def assert_valid(
    scenario: Scenario,
    solution: Solution,
    mode: SegmentationMode = SegmentationMode.SG,
) -> None:
    """Raise InvalidSolutionError when validation reports anything."""
    violations = validate_solution(scenario, solution, mode)
    if violations:
        raise InvalidSolutionError(
            f"solution violates {len(violations)} constraint check(s); first: {violations[0]}",
            violations,
        )
