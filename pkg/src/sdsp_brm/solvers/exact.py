"""Exact oracle for small SDSP-BRM instances."""

import itertools
import math
import time
from typing import Dict, List, Optional, Sequence, Tuple

from ..core.model import (
    OracleRefusal,
    Scenario,
    SegmentationMode,
    Solution,
    compute_service_matrix,
)
from ..utils.config import OracleLimits, SehaConfig
from ..utils.logging import get_logger
from .construction import EPS, construct_greedy
from .flow import transport_fragments


logger = get_logger(__name__)

Pattern = Dict[int, Tuple[int, ...]]


class _BudgetExhausted(Exception):
    pass


class _PatternSearch:
    """Depth-first enumeration of window sets for one candidate subset."""

    def __init__(
        self,
        demands: Dict[int, float],
        options: Dict[int, List[Tuple[int, ...]]],
        capacities: Dict[int, float],
        ld: float,
        node_budget: int,
        deadline: float,
    ):
        self.demands = demands
        self.options = options
        self.capacities = capacities
        self.ld = ld
        self.node_budget = node_budget
        self.deadline = deadline
        self.nodes = 0

    def run(self, order: Sequence[int]) -> Optional[Dict[int, Dict[int, float]]]:
        return self._extend(order, 0, {})

    def _extend(
        self,
        order: Sequence[int],
        depth: int,
        pattern: Pattern,
    ) -> Optional[Dict[int, Dict[int, float]]]:
        i = order[depth]
        for windows in self.options[i]:
            self.nodes += 1
            if self.nodes > self.node_budget or time.monotonic() > self.deadline:
                raise _BudgetExhausted()
            pattern[i] = windows
            # A partial pattern that cannot carry its data stays infeasible
            # whatever the remaining data add.
            fragments = transport_fragments(self.demands, pattern, self.capacities, self.ld)
            if fragments is not None:
                if depth + 1 == len(order):
                    return fragments
                found = self._extend(order, depth + 1, pattern)
                if found is not None:
                    return found
            del pattern[i]
        return None


def _window_options(
    serviceable: Sequence[int],
    duration: float,
    ld: float,
    mode: SegmentationMode,
) -> List[Tuple[int, ...]]:
    max_pieces = 1 if mode == SegmentationMode.NONSG else int(math.floor(duration / ld + EPS))
    max_pieces = min(max_pieces, len(serviceable))
    return [
        combo
        for size in range(1, max_pieces + 1)
        for combo in itertools.combinations(serviceable, size)
    ]


def exact_solve(
    scenario: Scenario,
    ld: Optional[float] = None,
    limits: Optional[OracleLimits] = None,
    mode: SegmentationMode = SegmentationMode.SG,
) -> Tuple[Solution, bool]:
    """
    Solve a small instance to proven optimality.

    Subsets of data are tried in decreasing total reward; the first subset
    admitting a feasible window pattern is optimal. Only subsets beating the
    greedy incumbent are tried, and each is screened by a max-flow without
    lower bounds before its patterns (window sets of at most d_i / ld windows,
    one window in NonSG) are searched.

    Args:
        scenario: Scenario to solve
        ld: Minimum fragment length override (defaults to the scenario's)
        limits: Size and effort limits
        mode: Segmentation mode

    Returns:
        Tuple of (solution, proven optimal). On budget exhaustion the best
        solution found so far is returned with False.

    Raises:
        OracleRefusal: If the instance exceeds max_data or max_windows
    """
    limits = limits or OracleLimits()
    if ld is not None and ld != scenario.ld:
        if ld <= 0:
            raise OracleRefusal(f"ld must be positive, got {ld}")
        scenario = scenario.model_copy(update={"ld": ld})
    n, m = scenario.n_data, scenario.n_windows
    if n > limits.max_data:
        logger.warning(f"Exact oracle refused: N={n} exceeds max_data={limits.max_data}")
        raise OracleRefusal(f"N={n} exceeds max_data={limits.max_data}")
    if m > limits.max_windows:
        logger.warning(f"Exact oracle refused: M={m} exceeds max_windows={limits.max_windows}")
        raise OracleRefusal(f"M={m} exceeds max_windows={limits.max_windows}")
    if n == 0 or m == 0:
        return Solution.empty(n, m), True

    start = time.monotonic()
    deadline = start + limits.time_budget
    ld_value = scenario.ld
    matrix = compute_service_matrix(scenario)
    durations = scenario.durations().tolist()
    priorities = scenario.priorities().tolist()
    capacities = {j: w.l for j, w in enumerate(scenario.windows)}
    total_capacity = sum(capacities.values())

    incumbent = construct_greedy(scenario, SehaConfig(sg_mode=mode))
    serviceable = {i: matrix.serviceable(i).tolist() for i in range(n)}
    eligible = [i for i in range(n) if serviceable[i] and durations[i] >= ld_value - EPS]

    candidates: List[Tuple[int, Tuple[int, ...]]] = []
    for size in range(1, len(eligible) + 1):
        for subset in itertools.combinations(eligible, size):
            value = sum(priorities[i] for i in subset)
            load = sum(durations[i] for i in subset)
            if value > incumbent.objective and load <= total_capacity + EPS:
                candidates.append((value, subset))
    candidates.sort(key=lambda c: (-c[0], c[1]))

    options = {
        i: _window_options(serviceable[i], durations[i], ld_value, mode) for i in eligible
    }
    search = _PatternSearch(
        {i: durations[i] for i in eligible}, options, capacities, ld_value,
        limits.node_budget, deadline,
    )

    for value, subset in candidates:
        relaxed = transport_fragments(
            {i: durations[i] for i in subset},
            {i: serviceable[i] for i in subset},
            capacities,
            0.0,
        )
        if relaxed is None:
            continue
        order = sorted(subset, key=lambda i: (-durations[i], i))
        try:
            fragments = search.run(order)
        except _BudgetExhausted:
            logger.warning(
                "Exact oracle budget exhausted",
                extra={"extra": {
                    "nodes": search.nodes,
                    "elapsed_s": round(time.monotonic() - start, 3),
                    "incumbent": incumbent.objective,
                }},
            )
            return incumbent, False
        if fragments is not None:
            solution = Solution.from_allocations(scenario, fragments)
            logger.info(
                "Exact oracle proved optimum",
                extra={"extra": {"objective": value, "nodes": search.nodes}},
            )
            return solution, True

    logger.info(
        "Exact oracle proved greedy incumbent optimal",
        extra={"extra": {"objective": incumbent.objective, "nodes": search.nodes}},
    )
    return incumbent, True
