"""Constraint validation, including a seeded mutation catalog."""

from typing import Callable, Dict, Tuple

import numpy as np
import pytest

from sdsp_brm.core.model import (
    InputError,
    InvalidSolutionError,
    Scenario,
    SegmentationMode,
    Solution,
    compute_service_matrix,
)
from sdsp_brm.core.validator import assert_valid, validate_solution
from sdsp_brm.scenarios.generator import generate_scenario, preset_params
from sdsp_brm.solvers.construction import construct_greedy, make_rng
from sdsp_brm.utils.config import SehaConfig


def mutate(solution: Solution, **changes) -> Solution:
    """Copy a solution with selected arrays edited in place by callables."""
    arrays = {
        "x": np.array(solution.x), "y": np.array(solution.y),
        "g": np.array(solution.g), "q": np.array(solution.q),
    }
    objective = changes.pop("objective", solution.objective)
    for name, edit in changes.items():
        edit(arrays[name])
    return Solution(objective=objective, **arrays)


def labels(violations) -> Dict[str, set]:
    found: Dict[str, set] = {}
    for v in violations:
        found.setdefault(v.constraint, set()).add(v.index)
    return found


@pytest.fixture
def optimum_a(instance_a):
    return Solution.from_allocations(instance_a, {0: {0: 50.0, 1: 40.0}})


def test_instance_a_optimum_is_valid(instance_a, optimum_a):
    assert validate_solution(instance_a, optimum_a) == []
    assert_valid(instance_a, optimum_a)


def test_empty_solution_is_valid(instance_a):
    assert validate_solution(instance_a, Solution.empty(2, 3)) == []
    assert validate_solution(instance_a, Solution.empty(2, 3), SegmentationMode.NONSG) == []


def test_fragment_below_ld(instance_a, optimum_a):
    bad = mutate(optimum_a, y=lambda y: y.__setitem__((0, 1), 5.0))
    assert (1, 2) in labels(validate_solution(instance_a, bad))["6"]


def test_fragment_above_duration(instance_a, optimum_a):
    bad = mutate(optimum_a, y=lambda y: y.__setitem__((0, 0), 95.0))
    found = labels(validate_solution(instance_a, bad))
    assert (1, 1) in found["6"]
    assert (1,) in found["7"]


def test_fragment_without_selection(instance_a, optimum_a):
    def add_pair(g):
        g[1, 2] = 1.0

    def add_fragment(y):
        y[1, 2] = 20.0

    bad = mutate(optimum_a, g=add_pair, y=add_fragment)
    assert (2, 3) in labels(validate_solution(instance_a, bad))["10"]


def test_fragment_against_service_matrix(service_example):
    def add_pair(g):
        g[2, 0] = 1.0

    bad = mutate(Solution.empty(3, 2), g=add_pair)
    assert (3, 1) in labels(validate_solution(service_example, bad))["9"]


def test_window_overfill(instance_a, optimum_a):
    def shift(y):
        y[0, 0], y[0, 1] = 60.0, 30.0

    bad = mutate(optimum_a, y=shift)
    found = labels(validate_solution(instance_a, bad))
    assert found["8"] == {(1,)}
    assert "7" not in found


def test_negative_fragment(instance_a, optimum_a):
    bad = mutate(optimum_a, y=lambda y: y.__setitem__((1, 2), -1.0))
    assert (2, 3) in labels(validate_solution(instance_a, bad))["11"]


def test_integrality(instance_a, optimum_a):
    bad_g = mutate(optimum_a, g=lambda g: g.__setitem__((0, 0), 0.5))
    assert (1, 1) in labels(validate_solution(instance_a, bad_g))["12"]
    bad_x = mutate(optimum_a, x=lambda x: x.__setitem__(1, 0.5))
    assert (2,) in labels(validate_solution(instance_a, bad_x))["13"]


def test_window_use_flag(instance_a, optimum_a):
    bad = mutate(optimum_a, q=lambda q: q.__setitem__(2, 1.0))
    assert labels(validate_solution(instance_a, bad)) == {"q": {(3,)}}


def test_nonsg_rejects_split(instance_a, optimum_a):
    found = labels(validate_solution(instance_a, optimum_a, SegmentationMode.NONSG))
    assert found == {"nonsg": {(1,)}}


def test_stored_objective_mismatch(instance_a, optimum_a):
    bad = mutate(optimum_a, objective=7)
    assert labels(validate_solution(instance_a, bad)) == {"objective": {()}}


def test_dimension_mismatch(instance_a):
    with pytest.raises(InputError):
        validate_solution(instance_a, Solution.empty(2, 2))


def test_assert_valid_carries_violations(instance_a, optimum_a):
    bad = mutate(optimum_a, objective=0)
    with pytest.raises(InvalidSolutionError) as excinfo:
        assert_valid(instance_a, bad)
    assert [v.constraint for v in excinfo.value.violations] == ["objective"]


def test_violation_text_names_constraint(instance_a, optimum_a):
    bad = mutate(optimum_a, y=lambda y: y.__setitem__((0, 1), 5.0))
    first = validate_solution(instance_a, bad)[0]
    assert str(first).startswith("(6) at (1,2)")


# --- seeded mutation catalog ---

Mutation = Callable[[Scenario, Solution, np.random.Generator], Tuple[Solution, str, tuple]]


def _used_pair(solution: Solution, rng: np.random.Generator) -> Tuple[int, int]:
    pairs = [(i, j) for i, j, _ in solution.assignments()]
    return pairs[int(rng.integers(len(pairs)))]


def _y_below_ld(scenario, solution, rng):
    i, j = _used_pair(solution, rng)
    bad = mutate(solution, y=lambda y: y.__setitem__((i, j), scenario.ld / 2))
    return bad, "6", (i + 1, j + 1)


def _y_above_d(scenario, solution, rng):
    i, j = _used_pair(solution, rng)
    bad = mutate(solution, y=lambda y: y.__setitem__((i, j), scenario.data[i].d + 1.0))
    return bad, "6", (i + 1, j + 1)


def _g_without_x(scenario, solution, rng):
    i, j = _used_pair(solution, rng)
    bad = mutate(solution, x=lambda x: x.__setitem__(i, 0.0), objective=solution.objective)
    return bad, "10", (i + 1, j + 1)


def _g_against_r(scenario, solution, rng):
    blocked = np.argwhere(compute_service_matrix(scenario).r == 0)
    i, j = (int(v) for v in blocked[int(rng.integers(len(blocked)))])
    bad = mutate(solution, g=lambda g: g.__setitem__((i, j), 1.0))
    return bad, "9", (i + 1, j + 1)


def _g_on_idle_pair(scenario, solution, rng):
    idle = np.argwhere((compute_service_matrix(scenario).r == 1) & (solution.g < 0.5))
    i, j = (int(v) for v in idle[int(rng.integers(len(idle)))])
    bad = mutate(solution, g=lambda g: g.__setitem__((i, j), 1.0))
    return bad, "6", (i + 1, j + 1)


def _window_overfill(scenario, solution, rng):
    i, j = _used_pair(solution, rng)
    extra = scenario.windows[j].l
    bad = mutate(solution, y=lambda y: y.__setitem__((i, j), y[i, j] + extra))
    return bad, "8", (j + 1,)


MUTATIONS: Dict[str, Mutation] = {
    "y_below_ld": _y_below_ld,
    "y_above_d": _y_above_d,
    "g_without_x": _g_without_x,
    "g_against_r": _g_against_r,
    "g_on_idle_pair": _g_on_idle_pair,
    "window_overfill": _window_overfill,
}


@pytest.mark.parametrize("seed", range(20))
@pytest.mark.parametrize("kind", list(MUTATIONS))
def test_mutation_is_flagged(seed, kind):
    scenario = generate_scenario(preset_params("20x8", seed=seed))
    solution = construct_greedy(scenario, SehaConfig(seed=seed))
    assert solution.objective > 0
    assert validate_solution(scenario, solution) == []

    bad, constraint, index = MUTATIONS[kind](scenario, solution, make_rng(seed))
    found = labels(validate_solution(scenario, bad))
    assert index in found.get(constraint, set()), f"{kind}: {found}"


@pytest.mark.parametrize("seed", range(10))
def test_unsplit_solutions_are_valid_with_splitting_allowed(seed):
    scenario = generate_scenario(preset_params("20x8", seed=seed))
    solution = construct_greedy(scenario, SehaConfig(seed=seed, sg_mode=SegmentationMode.NONSG))
    assert validate_solution(scenario, solution, SegmentationMode.NONSG) == []
    assert validate_solution(scenario, solution) == []
