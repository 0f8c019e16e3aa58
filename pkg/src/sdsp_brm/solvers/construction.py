"""Heuristic rules, fragment allocation and greedy construction for SEHA."""

from typing import Dict, List, Optional, Sequence

import numpy as np

from ..core.model import (
    ImagingData,
    Scenario,
    SegmentationMode,
    ServiceMatrix,
    Solution,
    compute_service_matrix,
)
from ..utils.config import SehaConfig
from ..utils.logging import get_logger


logger = get_logger(__name__)

# Float slack for the fill rule; well inside the 1e-6 s validation tolerance
EPS = 1e-9


def make_rng(seed: int) -> np.random.Generator:
    """The single generator family used by every randomized step (PCG64)."""
    return np.random.Generator(np.random.PCG64(seed))


def contribution_rates(scenario: Scenario) -> np.ndarray:
    """
    Priority per playback second, normalised so the best data scores 1.

    Args:
        scenario: Scenario whose data are scored

    Returns:
        c_i = (p_i / d_i) / max_k (p_k / d_k)
    """
    if scenario.n_data == 0:
        return np.zeros(0)
    ratio = scenario.priorities() / scenario.durations()
    return ratio / ratio.max()


def window_service_coefficients(matrix: ServiceMatrix) -> np.ndarray:
    """Number of data each window can serve (column sums of r)."""
    return matrix.r.sum(axis=0).astype(np.int64)


def allocate_data(
    data: ImagingData,
    window_order: Sequence[int],
    residuals: Sequence[float],
    ld: float,
    sg_mode: SegmentationMode = SegmentationMode.SG,
) -> Optional[Dict[int, float]]:
    """
    Split one data over windows in the given order, or fail.

    SG: take min(remainder, residual) from each window in turn, shrinking the
    piece when the tail left behind would be shorter than ld; windows that
    cannot take ld are skipped. NonSG: the first window holding all of d.
    Nothing is changed here; the caller applies the pieces.

    Args:
        data: Data to place
        window_order: Window indices to try, all able to serve this data
        residuals: Remaining capacity per window index
        ld: Minimum fragment length
        sg_mode: Segmentation mode

    Returns:
        {window index: fragment duration} covering all of d, or None
    """
    d = data.d
    if d < ld - EPS:
        return None

    if sg_mode == SegmentationMode.NONSG:
        for j in window_order:
            if residuals[j] >= d - EPS:
                return {j: d}
        return None

    pieces: Dict[int, float] = {}
    remainder = d
    for j in window_order:
        cap = residuals[j]
        if cap < ld - EPS:
            continue
        piece = min(remainder, cap)
        tail = remainder - piece
        if tail <= EPS:
            piece = remainder
        elif tail < ld - EPS:
            piece = remainder - ld
        if piece < ld - EPS:
            continue
        pieces[j] = piece
        remainder -= piece
        if remainder <= EPS:
            return pieces
    return None


def _window_ranking(
    scenario: Scenario,
    matrix: ServiceMatrix,
    rule2_on: bool,
    rng: np.random.Generator,
) -> List[int]:
    if rule2_on:
        coeffs = window_service_coefficients(matrix)
        return sorted(
            range(scenario.n_windows),
            key=lambda j: (int(coeffs[j]), scenario.windows[j].m),
        )
    return rng.permutation(scenario.n_windows).tolist()


def data_order(
    scenario: Scenario,
    rule1_on: bool,
    rng: np.random.Generator,
) -> List[int]:
    """Greater contribution rate first (ties by identity), or a seeded shuffle."""
    if rule1_on:
        rates = contribution_rates(scenario)
        return sorted(
            range(scenario.n_data),
            key=lambda i: (-float(rates[i]), scenario.data[i].n),
        )
    return rng.permutation(scenario.n_data).tolist()


class SearchState:
    """
    Incrementally maintained schedule: fragments, residuals and objective.

    The per-data candidate window lists follow the rule-2 ranking (or one
    seeded random ranking per run) restricted to serviceable windows.
    """

    def __init__(self, scenario: Scenario, config: SehaConfig, rng: np.random.Generator):
        """
        Initialize an empty schedule.

        Args:
            scenario: Scenario to schedule
            config: Search configuration (mode, rule 2 flag)
            rng: Run generator; consumed only when rule 2 is off
        """
        self.scenario = scenario
        self.ld = scenario.ld
        self.mode = config.sg_mode
        self.priorities: List[int] = [t.p for t in scenario.data]
        self.residuals: List[float] = [w.l for w in scenario.windows]
        self.allocations: Dict[int, Dict[int, float]] = {}
        self.objective = 0

        matrix = compute_service_matrix(scenario)
        ranking = _window_ranking(scenario, matrix, config.rule2_on, rng)
        rank_of = np.empty(scenario.n_windows, dtype=np.int64)
        rank_of[ranking] = np.arange(scenario.n_windows)
        self.candidates: List[List[int]] = []
        for i in range(scenario.n_data):
            cols = matrix.serviceable(i)
            self.candidates.append(cols[np.argsort(rank_of[cols], kind="stable")].tolist())

    @property
    def scheduled(self) -> List[int]:
        return sorted(self.allocations)

    def unscheduled(self) -> List[int]:
        return [i for i in range(self.scenario.n_data) if i not in self.allocations]

    def max_residual(self) -> float:
        return max(self.residuals, default=0.0)

    def place(self, i: int, pieces: Dict[int, float]) -> None:
        for j, dur in pieces.items():
            self.residuals[j] -= dur
        self.allocations[i] = pieces
        self.objective += self.priorities[i]

    def release(self, i: int) -> Dict[int, float]:
        pieces = self.allocations.pop(i)
        for j, dur in pieces.items():
            self.residuals[j] += dur
        self.objective -= self.priorities[i]
        return pieces

    def try_insert(self, i: int) -> bool:
        pieces = allocate_data(
            self.scenario.data[i], self.candidates[i], self.residuals, self.ld, self.mode,
        )
        if pieces is None:
            return False
        self.place(i, pieces)
        return True

    def load(self, solution: Solution) -> None:
        """Adopt the fragments of an existing (validated) solution."""
        for i, pieces in sorted(solution.allocations().items()):
            self.place(i, pieces)

    def to_solution(self) -> Solution:
        return Solution.from_allocations(self.scenario, self.allocations)


def construct(state: SearchState, rule1_on: bool, rng: np.random.Generator) -> None:
    """Greedy construction: examine every data once, skipping failures."""
    for i in data_order(state.scenario, rule1_on, rng):
        state.try_insert(i)


def construct_greedy(scenario: Scenario, config: SehaConfig) -> Solution:
    """
    Build an initial schedule with the heuristic rules.

    Data are examined in decreasing contribution rate (rule 1) and placed into
    windows in increasing service coefficient (rule 2); a disabled rule is
    replaced by a seeded random order.

    Args:
        scenario: Scenario to schedule
        config: Rule flags, mode and seed

    Returns:
        Feasible solution (empty when there are no data or no windows)
    """
    if scenario.n_data == 0 or scenario.n_windows == 0:
        return Solution.empty(scenario.n_data, scenario.n_windows)
    rng = make_rng(config.seed)
    state = SearchState(scenario, config, rng)
    construct(state, config.rule1_on, rng)
    logger.debug(
        "Constructed initial schedule",
        extra={"extra": {
            "objective": state.objective,
            "scheduled": len(state.allocations),
            "rule1": config.rule1_on,
            "rule2": config.rule2_on,
        }},
    )
    return state.to_solution()
