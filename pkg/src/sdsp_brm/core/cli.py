"""Command dispatcher: generate, solve, exact, validate, export-lp, bench."""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

from pydantic import ValidationError

from .. import __version__
from ..api.codec import (
    load_scenario,
    load_solution,
    save_json,
    save_scenario,
    save_solution,
)
from ..experiments.report import REPORT_FORMATS, emit_report, format_summary
from ..experiments.studies import (
    StudyReport,
    run_comparison,
    run_initial_solution_study,
    run_rule_ablation,
    run_segmentation_study,
)
from ..scenarios.generator import generate_scenario, preset_params
from ..solvers.exact import exact_solve
from ..solvers.lp_export import export_lp
from ..solvers.seha import run_seha
from ..utils.config import Config, GenParams, OracleLimits, SehaConfig, load_config
from ..utils.logging import get_logger, setup_logging
from .model import (
    InputError,
    InvalidSolutionError,
    OracleRefusal,
    Scenario,
    ScenarioFormatError,
    SDSPError,
    SegmentationMode,
)
from .validator import validate_solution


logger = get_logger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_USAGE = 2
EXIT_IO = 3

RULES: Dict[str, Dict[str, bool]] = {
    "ab": {"rule1_on": True, "rule2_on": True},
    "a": {"rule1_on": True, "rule2_on": False},
    "b": {"rule1_on": False, "rule2_on": True},
    "none": {"rule1_on": False, "rule2_on": False},
}

STUDIES = ("comparison", "ablation", "initial", "segmentation")


class UsageError(SDSPError):
    """Flags that parse but cannot be combined."""
    pass


def _common_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--config", metavar="PATH", help="YAML configuration file")
    parent.add_argument(
        "--log-level", metavar="LEVEL",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Override the configured log level",
    )
    return parent


def _model_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--ld", type=float, help="Minimum fragment length override (s)")
    parent.add_argument("--mode", choices=[m.value for m in SegmentationMode],
                        help="Segmentation mode")
    return parent


def _solver_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--seed", type=int, help="Search seed")
    parent.add_argument("--rules", choices=list(RULES), help="Construction rules enabled")
    parent.add_argument("--max-iter", type=int, help="Iteration limit")
    parent.add_argument("--noup-iter", type=int, help="Iterations without improvement")
    parent.add_argument("--time-limit", type=float, help="Wall-clock limit (s)")
    parent.add_argument("--remove-fraction", type=float,
                        help="Share of scheduled data removed per move")
    parent.add_argument("--params", metavar="JSON",
                        help="JSON file with a SEHA parameter block")
    return parent


def _oracle_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--max-data", type=int, help="Oracle limit on N")
    parent.add_argument("--max-windows", type=int, help="Oracle limit on M")
    parent.add_argument("--node-budget", type=int, help="Oracle search node budget")
    parent.add_argument("--oracle-time", type=float, help="Oracle time budget (s)")
    return parent


def build_parser() -> argparse.ArgumentParser:
    common = _common_parent()
    model = _model_parent()
    solver = _solver_parent()
    oracle = _oracle_parent()

    parser = argparse.ArgumentParser(
        prog="sdsp-brm",
        description="Satellite downlink scheduling with breakpoint resume",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    gen = sub.add_parser("generate", parents=[common], help="Generate a random scenario")
    gen.add_argument("--m", type=int, help="Number of playback windows")
    gen.add_argument("--n", type=int, help="Exact number of imaging data")
    gen.add_argument("--preset", help="Size label NxM, e.g. 200x85")
    gen.add_argument("--ld", type=float, help="Minimum fragment length (s)")
    gen.add_argument("--seed", type=int, help="Generator seed")
    gen.add_argument("--gap-mean", type=float, help="Mean gap between events (s)")
    gen.add_argument("--gap-std", type=float, help="Gap standard deviation (s)")
    gen.add_argument("--a-low", type=float, help="Lower bound of N/M")
    gen.add_argument("--a-high", type=float, help="Upper bound of N/M")
    gen.add_argument("--out", required=True, help="Scenario JSON output path")

    solve = sub.add_parser("solve", parents=[common, model, solver], help="Run SEHA on a scenario")
    solve.add_argument("scenario", help="Scenario JSON")
    solve.add_argument("--out", required=True, help="Solution JSON output path")
    solve.add_argument("--stats", help="Stats JSON path (default: <out stem>.stats.json)")

    exact = sub.add_parser("exact", parents=[common, model, oracle],
                           help="Solve a small scenario to optimality")
    exact.add_argument("scenario", help="Scenario JSON")
    exact.add_argument("--out", required=True, help="Solution JSON output path")
    exact.add_argument("--stats", help="Optimality JSON path (default: <out stem>.exact.json)")

    val = sub.add_parser("validate", parents=[common], help="Check a solution")
    val.add_argument("scenario", help="Scenario JSON")
    val.add_argument("solution", help="Solution JSON")
    val.add_argument("--mode", choices=[m.value for m in SegmentationMode])

    lp = sub.add_parser("export-lp", parents=[common, model], help="Write the MIP in LP format")
    lp.add_argument("scenario", help="Scenario JSON")
    lp.add_argument("--out", required=True, help="LP output path")

    bench = sub.add_parser("bench", parents=[common, model, solver, oracle], help="Run studies")
    bench.add_argument("--study", choices=[*STUDIES, "all"], default="all")
    bench.add_argument("--sizes", help="Comma-separated size labels")
    bench.add_argument("--repeats", type=int, help="Runs per size")
    bench.add_argument("--out-dir", help="Report directory")
    bench.add_argument("--format", help=f"Comma-separated subset of {','.join(REPORT_FORMATS)}")

    return parser


def _overrides(args: argparse.Namespace, mapping: Dict[str, str]) -> Dict[str, Any]:
    return {
        field: getattr(args, attr)
        for attr, field in mapping.items()
        if getattr(args, attr, None) is not None
    }


def _seha_config(args: argparse.Namespace, base: SehaConfig) -> SehaConfig:
    """Flags > --params block > config file > defaults."""
    merged: Dict[str, Any] = base.model_dump()
    if getattr(args, "params", None):
        block = json.loads(Path(args.params).read_text())
        if not isinstance(block, dict):
            raise UsageError(f"{args.params}: expected a JSON object")
        merged.update(SehaConfig.model_validate(block).model_dump(exclude_unset=True))
    merged.update(_overrides(args, {
        "seed": "seed",
        "max_iter": "max_iter",
        "noup_iter": "noup_iter",
        "time_limit": "solve_time",
        "remove_fraction": "remove_fraction",
        "mode": "sg_mode",
    }))
    if getattr(args, "rules", None):
        merged.update(RULES[args.rules])
    return SehaConfig.model_validate(merged)


def _oracle_limits(args: argparse.Namespace, base: OracleLimits) -> OracleLimits:
    merged = base.model_dump()
    merged.update(_overrides(args, {
        "max_data": "max_data",
        "max_windows": "max_windows",
        "node_budget": "node_budget",
        "oracle_time": "time_budget",
    }))
    return OracleLimits.model_validate(merged)


def _mode(args: argparse.Namespace) -> SegmentationMode:
    return SegmentationMode(args.mode) if args.mode else SegmentationMode.SG


def _with_ld(scenario: Scenario, ld: Optional[float]) -> Scenario:
    """Rebuild the scenario under an --ld override so its invariants are rechecked."""
    if ld is None:
        return scenario
    if ld <= 0:
        raise UsageError(f"--ld must be positive, got {ld:g}")
    return Scenario.model_validate({**scenario.model_dump(), "ld": ld})


def _sidecar(out: str, explicit: Optional[str], suffix: str) -> Path:
    if explicit:
        return Path(explicit)
    path = Path(out)
    return path.with_name(f"{path.stem}{suffix}")


def cmd_generate(args: argparse.Namespace, config: Config) -> int:
    base = config.generator
    if args.preset:
        preset = preset_params(args.preset, ld=base.ld, seed=base.seed)
        base = base.model_copy(update={"m": preset.m, "n": preset.n})
    merged = base.model_dump()
    merged.update(_overrides(args, {
        "m": "m", "n": "n", "ld": "ld", "seed": "seed",
        "gap_mean": "gap_mean", "gap_std": "gap_std",
        "a_low": "a_low", "a_high": "a_high",
    }))
    params = GenParams.model_validate(merged)
    scenario = generate_scenario(params)
    save_scenario(scenario, args.out)
    print(f"✅ Scenario: N={scenario.n_data} M={scenario.n_windows} "
          f"ld={scenario.ld:g} seed={params.seed} -> {args.out}")
    return EXIT_OK


def cmd_solve(args: argparse.Namespace, config: Config) -> int:
    scenario = _with_ld(load_scenario(args.scenario), args.ld)
    seha = _seha_config(args, config.solver)
    solution, stats = run_seha(scenario, seha)
    save_solution(scenario, solution, args.out, seha.sg_mode)
    stats_path = _sidecar(args.out, args.stats, ".stats.json")
    save_json(stats.to_dict(), stats_path)
    print(f"✅ SEHA objective {solution.objective} "
          f"(initial {stats.initial_objective}, {stats.iterations} iterations, "
          f"stopped on {stats.stop_reason}) -> {args.out}")
    return EXIT_OK


def cmd_exact(args: argparse.Namespace, config: Config) -> int:
    scenario = _with_ld(load_scenario(args.scenario), args.ld)
    mode = _mode(args) if args.mode else config.solver.sg_mode
    limits = _oracle_limits(args, config.oracle)
    solution, proven = exact_solve(scenario, limits=limits, mode=mode)
    save_solution(scenario, solution, args.out, mode)
    flag_path = _sidecar(args.out, args.stats, ".exact.json")
    save_json({"objective": solution.objective, "proven_optimal": proven}, flag_path)
    status = "optimal" if proven else "best found (budget exhausted)"
    print(f"✅ Oracle objective {solution.objective}, {status} -> {args.out}")
    return EXIT_OK


def cmd_validate(args: argparse.Namespace, config: Config) -> int:
    scenario = load_scenario(args.scenario)
    solution = load_solution(scenario, args.solution)
    mode = _mode(args) if args.mode else config.solver.sg_mode
    violations = validate_solution(scenario, solution, mode)
    if not violations:
        print(f"✅ OK: objective {solution.objective}, {len(solution.scheduled())} data scheduled")
        return EXIT_OK
    print(f"❌ {len(violations)} violation(s):")
    for violation in violations:
        print(f"  {violation}")
    return EXIT_INVALID


def cmd_export_lp(args: argparse.Namespace, config: Config) -> int:
    scenario = _with_ld(load_scenario(args.scenario), args.ld)
    text = export_lp(scenario, mode=_mode(args))
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)
    print(f"✅ LP model for N={scenario.n_data} M={scenario.n_windows} -> {args.out}")
    return EXIT_OK


def _split(value: Optional[str], default: Sequence[str]) -> List[str]:
    if not value:
        return list(default)
    return [part.strip() for part in value.split(",") if part.strip()]


def cmd_bench(args: argparse.Namespace, config: Config) -> int:
    settings = config.experiments
    seha = _seha_config(args, config.solver)
    limits = _oracle_limits(args, config.oracle)
    sizes = _split(args.sizes, settings.sizes)
    repeats = args.repeats if args.repeats is not None else settings.repeats
    seed = args.seed if args.seed is not None else settings.seed
    ld = args.ld if args.ld is not None else config.generator.ld
    formats = _split(args.format, settings.formats)
    unknown = [f for f in formats if f not in REPORT_FORMATS]
    if unknown:
        raise UsageError(f"unknown report format(s): {', '.join(unknown)}")
    if repeats < 1:
        raise UsageError("--repeats must be at least 1")
    out_dir = args.out_dir or settings.out_dir

    studies: Dict[str, Callable[[], List[StudyReport]]] = {
        "comparison": lambda: [run_comparison(
            sizes, repeats, [seed], seha.model_copy(update={"seed": seed}), limits, ld,
        )],
        "ablation": lambda: [run_rule_ablation(size, repeats, seed, seha, ld) for size in sizes],
        "initial": lambda: [
            run_initial_solution_study(size, repeats, seed, seha, ld) for size in sizes
        ],
        "segmentation": lambda: [run_segmentation_study(sizes, repeats, seed, seha, ld)],
    }
    selected = STUDIES if args.study == "all" else (args.study,)

    for name in selected:
        logger.info(f"Running {name} study", extra={"extra": {"sizes": sizes, "repeats": repeats}})
        for report in studies[name]():
            if name in ("ablation", "initial") and len(sizes) > 1:
                size = report.rows[0].label if report.rows else "empty"
                report = report.model_copy(update={"name": f"{report.name}_{size}"})
            emit_report(report, formats, out_dir)
            print(format_summary(report))
    return EXIT_OK


COMMANDS: Dict[str, Callable[[argparse.Namespace, Config], int]] = {
    "generate": cmd_generate,
    "solve": cmd_solve,
    "exact": cmd_exact,
    "validate": cmd_validate,
    "export-lp": cmd_export_lp,
    "bench": cmd_bench,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse arguments, run one subcommand and map failures to exit codes.

    Returns:
        0 success or valid, 1 invalid solution or oracle refusal,
        2 usage or input error, 3 I/O or parse error
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        config = load_config(args.config)
    except FileNotFoundError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE

    logging_config = config.logging
    if args.log_level:
        logging_config = logging_config.model_copy(update={"level": args.log_level})
    setup_logging(logging_config)

    try:
        return COMMANDS[args.command](args, config)
    except (ScenarioFormatError, json.JSONDecodeError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_IO
    except OSError as e:
        name = getattr(e, "filename", None)
        where = f"{name}: " if name else ""
        print(f"Error: {where}{e.strerror or e}", file=sys.stderr)
        return EXIT_IO
    except InvalidSolutionError as e:
        print(f"Error: {e}", file=sys.stderr)
        for violation in e.violations:
            print(f"  {violation}", file=sys.stderr)
        return EXIT_INVALID
    except OracleRefusal as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except (InputError, UsageError, ValidationError, ValueError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
