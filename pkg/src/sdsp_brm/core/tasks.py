"""Playback task emission: the executable output of a schedule."""

from typing import List

import numpy as np

from .model import PlaybackTask, Scenario, SegmentationMode, Solution
from .validator import assert_valid


def emit_playback_tasks(
    scenario: Scenario,
    solution: Solution,
    mode: SegmentationMode = SegmentationMode.SG,
) -> List[PlaybackTask]:
    """
    Derive one playback task per used window.

    Fragments are placed back-to-back from the window start in ascending
    data identity order.

    Args:
        scenario: Scenario the solution solves
        solution: Validated solution
        mode: Segmentation mode the solution must satisfy

    Returns:
        Tasks ordered like the scenario's windows

    Raises:
        InvalidSolutionError: If the solution does not validate
    """
    assert_valid(scenario, solution, mode)

    tasks: List[PlaybackTask] = []
    for j, window in enumerate(scenario.windows):
        if solution.q[j] <= 0.5:
            continue
        rows = np.flatnonzero(solution.g[:, j] > 0.5)
        fragments = sorted(
            (scenario.data[i].n, float(solution.y[i, j])) for i in rows.tolist()
        )
        total = sum(dur for _, dur in fragments)
        tasks.append(PlaybackTask(
            m=window.m,
            ts=window.ds,
            te=window.ds + total,
            fragments=tuple(fragments),
        ))
    return tasks
