"""Comparative studies: oracle comparison, rule ablation, initial solution, segmentation."""

import statistics
import time
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, Field, model_validator

from ..core.model import OracleRefusal, Scenario, SegmentationMode, Solution
from ..core.validator import validate_solution
from ..scenarios.generator import generate_batch, generate_scenario, preset_params
from ..solvers.construction import construct_greedy
from ..solvers.exact import exact_solve
from ..solvers.seha import run_seha
from ..utils.config import OracleLimits, SehaConfig
from ..utils.logging import get_logger


logger = get_logger(__name__)

RULE_ARMS: Dict[str, Tuple[bool, bool]] = {
    "a&b": (True, True),
    "a&!b": (True, False),
    "!a&b": (False, True),
    "!a&!b": (False, False),
}


class ExperimentRow(BaseModel):
    """One aggregated line of a study report."""
    label: str
    N: int
    M: int
    seed: int
    arm: str
    R_max: Optional[float] = None
    R_min: Optional[float] = None
    R_mean: Optional[float] = None
    T_mean_s: float = Field(0.0, ge=0)
    Gap_R: Optional[float] = None
    Gap_Rbar: Optional[float] = None

    @model_validator(mode="after")
    def _check_order(self) -> "ExperimentRow":
        if self.R_min is not None and self.R_mean is not None and self.R_max is not None:
            if not (self.R_min - 1e-9 <= self.R_mean <= self.R_max + 1e-9):
                raise ValueError(f"R_min <= R_mean <= R_max violated for arm {self.arm}")
        return self


class Sample(BaseModel):
    """One raw run: the unit every aggregate is recomputed from."""
    label: str
    N: int
    M: int
    seed: int
    arm: str
    run_seed: int
    objective: Optional[float] = None
    runtime_s: float = 0.0
    valid: bool = True


class StudyReport(BaseModel):
    name: str
    rows: List[ExperimentRow] = []
    samples: List[Sample] = []


def aggregate(
    samples: Sequence[Sample],
    label: str,
    n: int,
    m: int,
    seed: int,
    arm: str,
) -> ExperimentRow:
    """Max/min/mean objective and mean runtime over the matching samples."""
    chosen = [s for s in samples if s.label == label and s.seed == seed and s.arm == arm]
    values = [s.objective for s in chosen if s.objective is not None]
    runtimes = [s.runtime_s for s in chosen]
    return ExperimentRow(
        label=label, N=n, M=m, seed=seed, arm=arm,
        R_max=max(values) if values else None,
        R_min=min(values) if values else None,
        R_mean=statistics.mean(values) if values else None,
        T_mean_s=statistics.mean(runtimes) if runtimes else 0.0,
    )


def _scenario_for(label: str, seed: int, ld: float) -> Tuple[Scenario, int, int]:
    params = preset_params(label, ld=ld, seed=seed)
    scenario = generate_scenario(params)
    return scenario, scenario.n_data, scenario.n_windows


def _paired_scenarios(label: str, repeats: int, seed: int, ld: float) -> List[Scenario]:
    """Scenario k of a paired study uses seed + k."""
    return generate_batch(preset_params(label, ld=ld, seed=seed), repeats)


def _timed_seha(
    scenario: Scenario,
    config: SehaConfig,
    initial: Optional[Solution] = None,
) -> Tuple[Solution, float, bool]:
    start = time.monotonic()
    solution, _ = run_seha(scenario, config, initial)
    elapsed = time.monotonic() - start
    valid = not validate_solution(scenario, solution, config.sg_mode)
    return solution, elapsed, valid


def run_comparison(
    sizes: Sequence[str],
    repeats: int,
    seeds: Sequence[int],
    config: Optional[SehaConfig] = None,
    limits: Optional[OracleLimits] = None,
    ld: float = 10.0,
) -> StudyReport:
    """
    SEHA against the exact oracle on generated scenarios.

    For each size and scenario seed, SEHA runs `repeats` times with search
    seeds config.seed, config.seed + 1, ...; the oracle runs once when the
    instance is within its limits. Gap columns are oracle minus SEHA, so a
    negative gap means SEHA did better.

    Args:
        sizes: Size labels ("NxM", presets included)
        repeats: SEHA runs per scenario
        seeds: Scenario seeds
        config: SEHA configuration
        limits: Oracle limits
        ld: Minimum fragment length for generated scenarios

    Returns:
        Report with seha and oracle rows per (size, seed)
    """
    config = config or SehaConfig()
    limits = limits or OracleLimits()
    report = StudyReport(name="comparison")

    for label in sizes:
        for seed in seeds:
            scenario, _, _ = _scenario_for(label, seed, ld)
            rows, samples = compare_scenario(scenario, label, seed, repeats, config, limits)
            report.rows.extend(rows)
            report.samples.extend(samples)

    return report


def compare_scenario(
    scenario: Scenario,
    label: str,
    seed: int,
    repeats: int,
    config: SehaConfig,
    limits: OracleLimits,
) -> Tuple[List[ExperimentRow], List[Sample]]:
    """SEHA repeats plus one oracle call on a single scenario."""
    n, m = scenario.n_data, scenario.n_windows
    samples: List[Sample] = []
    for k in range(repeats):
        run_config = config.model_copy(update={"seed": config.seed + k})
        solution, elapsed, valid = _timed_seha(scenario, run_config)
        samples.append(Sample(
            label=label, N=n, M=m, seed=seed, arm="seha", run_seed=run_config.seed,
            objective=solution.objective, runtime_s=elapsed, valid=valid,
        ))
    seha_row = aggregate(samples, label, n, m, seed, "seha")

    start = time.monotonic()
    try:
        optimum, proven = exact_solve(scenario, limits=limits, mode=config.sg_mode)
    except OracleRefusal as e:
        logger.info(f"Oracle skipped for {label} seed {seed}: {e}")
        refused = ExperimentRow(label=label, N=n, M=m, seed=seed, arm="oracle:refused")
        return [seha_row, refused], samples
    elapsed = time.monotonic() - start

    arm = "oracle" if proven else "oracle:unproven"
    samples.append(Sample(
        label=label, N=n, M=m, seed=seed, arm=arm, run_seed=0,
        objective=optimum.objective, runtime_s=elapsed,
        valid=not validate_solution(scenario, optimum, config.sg_mode),
    ))
    oracle_row = aggregate(samples, label, n, m, seed, arm)
    if (
        seha_row.R_max is not None and seha_row.R_mean is not None
        and oracle_row.R_max is not None and oracle_row.R_mean is not None
    ):
        seha_row.Gap_R = oracle_row.R_max - seha_row.R_max
        seha_row.Gap_Rbar = oracle_row.R_mean - seha_row.R_mean
    return [seha_row, oracle_row], samples


def run_rule_ablation(
    size: str,
    repeats: int,
    seed: int = 0,
    config: Optional[SehaConfig] = None,
    ld: float = 10.0,
) -> StudyReport:
    """
    Construction objectives under the four rule combinations.

    Scenario k uses seed + k and every arm constructs with that same seed, so
    arms differ only in the rules.
    """
    config = config or SehaConfig()
    report = StudyReport(name="rule_ablation")
    n = m = 0
    for k, scenario in enumerate(_paired_scenarios(size, repeats, seed, ld)):
        n, m = scenario.n_data, scenario.n_windows
        for arm, (rule1, rule2) in RULE_ARMS.items():
            arm_config = config.model_copy(
                update={"rule1_on": rule1, "rule2_on": rule2, "seed": seed + k}
            )
            start = time.monotonic()
            solution = construct_greedy(scenario, arm_config)
            elapsed = time.monotonic() - start
            report.samples.append(Sample(
                label=size, N=n, M=m, seed=seed, arm=arm, run_seed=seed + k,
                objective=solution.objective, runtime_s=elapsed,
                valid=not validate_solution(scenario, solution, arm_config.sg_mode),
            ))
    report.rows = [aggregate(report.samples, size, n, m, seed, arm) for arm in RULE_ARMS]
    return report


def run_initial_solution_study(
    size: str,
    repeats: int,
    seed: int = 0,
    config: Optional[SehaConfig] = None,
    ld: float = 10.0,
) -> StudyReport:
    """
    Final SEHA objectives from a heuristic start versus a random start.

    The random start is the construction with both rules off; both arms
    search with the same seed.
    """
    config = config or SehaConfig()
    report = StudyReport(name="initial_solution")
    n = m = 0
    for k, scenario in enumerate(_paired_scenarios(size, repeats, seed, ld)):
        n, m = scenario.n_data, scenario.n_windows
        search_config = config.model_copy(
            update={"rule1_on": True, "rule2_on": True, "seed": seed + k}
        )
        random_start = construct_greedy(
            scenario, search_config.model_copy(update={"rule1_on": False, "rule2_on": False}),
        )
        for arm, initial in (("H_Initial", None), ("R_Initial", random_start)):
            solution, elapsed, valid = _timed_seha(scenario, search_config, initial)
            report.samples.append(Sample(
                label=size, N=n, M=m, seed=seed, arm=arm, run_seed=seed + k,
                objective=solution.objective, runtime_s=elapsed, valid=valid,
            ))
    report.rows = [
        aggregate(report.samples, size, n, m, seed, arm) for arm in ("H_Initial", "R_Initial")
    ]
    return report


def run_segmentation_study(
    sizes: Sequence[str],
    repeats: int,
    seed: int = 0,
    config: Optional[SehaConfig] = None,
    ld: float = 10.0,
) -> StudyReport:
    """
    Paired SG versus NonSG SEHA runs, with the per-seed gap as its own arm.
    """
    config = config or SehaConfig()
    report = StudyReport(name="segmentation")
    for label in sizes:
        n = m = 0
        for k, scenario in enumerate(_paired_scenarios(label, repeats, seed, ld)):
            n, m = scenario.n_data, scenario.n_windows
            finals: Dict[str, float] = {}
            for arm, mode in (("SG", SegmentationMode.SG), ("NonSG", SegmentationMode.NONSG)):
                arm_config = config.model_copy(update={"sg_mode": mode, "seed": seed + k})
                solution, elapsed, valid = _timed_seha(scenario, arm_config)
                finals[arm] = solution.objective
                report.samples.append(Sample(
                    label=label, N=n, M=m, seed=seed, arm=arm, run_seed=seed + k,
                    objective=solution.objective, runtime_s=elapsed, valid=valid,
                ))
            report.samples.append(Sample(
                label=label, N=n, M=m, seed=seed, arm="SG-NonSG", run_seed=seed + k,
                objective=finals["SG"] - finals["NonSG"],
            ))
        report.rows.extend(
            aggregate(report.samples, label, n, m, seed, arm)
            for arm in ("SG", "NonSG", "SG-NonSG")
        )
    return report
