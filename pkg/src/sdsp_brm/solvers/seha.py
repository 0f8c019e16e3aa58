"""SEHA: greedy construction followed by remove/insert hill climbing."""

import math
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..core.model import Scenario, Solution
from ..core.validator import assert_valid
from ..utils.config import SehaConfig
from ..utils.logging import get_logger
from .construction import SearchState, construct, make_rng


logger = get_logger(__name__)

Removed = List[Tuple[int, Dict[int, float]]]


@dataclass
class RunStats:
    """Per-run search statistics."""
    iterations: int = 0
    improvements: int = 0
    elapsed_s: float = 0.0
    initial_objective: int = 0
    best_objective: int = 0
    stop_reason: str = ""
    trace: List[Tuple[int, int]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "iterations": self.iterations,
            "improvements": self.improvements,
            "elapsed_s": self.elapsed_s,
            "initial_objective": self.initial_objective,
            "best_objective": self.best_objective,
            "stop_reason": self.stop_reason,
            "trace": [[it, obj] for it, obj in self.trace],
        }


def removal_count(n_scheduled: int, fraction: float) -> int:
    """k = max(1, ceil(fraction * |scheduled|)), capped by what is scheduled."""
    if n_scheduled == 0:
        return 0
    # Round off float noise so 0.1 * 10 stays 1
    return min(n_scheduled, max(1, math.ceil(round(fraction * n_scheduled, 9))))


def remove_operator(
    state: SearchState,
    rng: np.random.Generator,
    fraction: float = 0.10,
) -> Removed:
    """
    Drop a random share of the scheduled data with all their fragments.

    Mutates state in place.

    Returns:
        Removed (data index, fragments) pairs, in removal order
    """
    scheduled = state.scheduled
    k = removal_count(len(scheduled), fraction)
    if k == 0:
        return []
    picks = rng.choice(len(scheduled), size=k, replace=False)
    return [(scheduled[p], state.release(scheduled[p])) for p in picks.tolist()]


def insert_operator(state: SearchState, rng: np.random.Generator) -> List[int]:
    """
    Try every unscheduled data once, in random order, keeping each success.

    Mutates state in place.

    Returns:
        Indices of the data inserted
    """
    pool = state.unscheduled()
    if not pool:
        return []
    inserted: List[int] = []
    room = state.max_residual()
    for p in rng.permutation(len(pool)).tolist():
        if room < state.ld:
            break
        i = pool[p]
        if state.try_insert(i):
            inserted.append(i)
            room = state.max_residual()
    return inserted


def rollback(state: SearchState, removed: Removed, inserted: List[int]) -> None:
    """Undo one remove/insert move exactly."""
    for i in reversed(inserted):
        state.release(i)
    for i, pieces in reversed(removed):
        state.place(i, pieces)


def run_seha(
    scenario: Scenario,
    config: SehaConfig,
    initial: Optional[Solution] = None,
) -> Tuple[Solution, RunStats]:
    """
    Run SEHA until an iteration, stagnation or time limit is hit.

    A move is one remove followed by one insert; it is kept only when the
    objective strictly increases, otherwise it is rolled back. The current
    schedule is therefore always the best one found.

    Args:
        scenario: Scenario to schedule
        config: Search configuration
        initial: Optional starting solution; defaults to the greedy construction

    Returns:
        Tuple of (best solution, run statistics)
    """
    start = time.monotonic()
    stats = RunStats()

    if scenario.n_data == 0 or scenario.n_windows == 0:
        stats.stop_reason = "empty"
        stats.trace = [(0, 0)]
        stats.elapsed_s = time.monotonic() - start
        return Solution.empty(scenario.n_data, scenario.n_windows), stats

    rng = make_rng(config.seed)
    state = SearchState(scenario, config, rng)
    if initial is None:
        construct(state, config.rule1_on, rng)
    else:
        assert_valid(scenario, initial, config.sg_mode)
        state.load(initial)

    stats.initial_objective = state.objective
    stats.trace.append((0, state.objective))
    no_improve = 0

    while True:
        if stats.iterations >= config.max_iter:
            stats.stop_reason = "max_iter"
            break
        if no_improve >= config.noup_iter:
            stats.stop_reason = "noup_iter"
            break
        if time.monotonic() - start >= config.solve_time:
            stats.stop_reason = "solve_time"
            break

        stats.iterations += 1
        before = state.objective
        removed = remove_operator(state, rng, config.remove_fraction)
        inserted = insert_operator(state, rng)

        if state.objective > before:
            stats.improvements += 1
            stats.trace.append((stats.iterations, state.objective))
            no_improve = 0
            logger.debug(
                f"Iteration {stats.iterations}: objective {before} -> {state.objective}"
            )
        else:
            rollback(state, removed, inserted)
            no_improve += 1

    stats.best_objective = state.objective
    stats.elapsed_s = time.monotonic() - start
    logger.info(
        "SEHA finished",
        extra={"extra": {
            "iterations": stats.iterations,
            "improvements": stats.improvements,
            "initial_objective": stats.initial_objective,
            "best_objective": stats.best_objective,
            "stop_reason": stats.stop_reason,
            "elapsed_s": round(stats.elapsed_s, 3),
        }},
    )
    return state.to_solution(), stats
