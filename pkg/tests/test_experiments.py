"""Study runners and report emitters."""

import csv

import pytest
from pydantic import ValidationError

from sdsp_brm.experiments.report import (
    CSV_COLUMNS,
    emit_report,
    format_summary,
    load_report_json,
    plot_series,
)
from sdsp_brm.experiments.studies import (
    RULE_ARMS,
    ExperimentRow,
    Sample,
    StudyReport,
    aggregate,
    compare_scenario,
    run_comparison,
    run_initial_solution_study,
    run_rule_ablation,
    run_segmentation_study,
)
from sdsp_brm.utils.config import OracleLimits, SehaConfig


FAST = SehaConfig(max_iter=300, noup_iter=50, solve_time=20)


def _without_runtime(rows):
    return [row.model_dump(exclude={"T_mean_s"}) for row in rows]


def test_aggregate():
    samples = [
        Sample(label="s", N=2, M=1, seed=0, arm="x", run_seed=k, objective=v, runtime_s=0.5)
        for k, v in enumerate([4.0, 6.0, 8.0])
    ]
    samples.append(Sample(label="s", N=2, M=1, seed=0, arm="y", run_seed=0, objective=100.0))
    row = aggregate(samples, "s", 2, 1, 0, "x")
    assert (row.R_max, row.R_min, row.R_mean, row.T_mean_s) == (8.0, 4.0, 6.0, 0.5)


def test_row_order_is_checked():
    with pytest.raises(ValidationError):
        ExperimentRow(label="s", N=1, M=1, seed=0, arm="x", R_max=1.0, R_min=2.0, R_mean=1.5)


def test_compare_instance_a(instance_a):
    rows, samples = compare_scenario(instance_a, "A", 0, 3, FAST, OracleLimits())
    seha, oracle = rows
    assert (seha.arm, oracle.arm) == ("seha", "oracle")
    assert seha.R_max == seha.R_min == 6.0
    assert oracle.R_max == 6.0
    assert seha.Gap_R == 0.0 and seha.Gap_Rbar == 0.0
    assert [s.run_seed for s in samples if s.arm == "seha"] == [0, 1, 2]
    assert all(s.valid for s in samples)


def test_compare_reports_refusal(instance_a):
    rows, _ = compare_scenario(instance_a, "A", 0, 1, FAST, OracleLimits(max_data=1))
    assert rows[1].arm == "oracle:refused"
    assert rows[1].R_mean is None
    assert rows[0].Gap_R is None


def test_comparison_over_sizes():
    report = run_comparison(["6x3"], 2, [0, 1], FAST)
    assert report.name == "comparison"
    assert [(r.seed, r.arm) for r in report.rows] == [
        (0, "seha"), (0, "oracle"), (1, "seha"), (1, "oracle"),
    ]
    for row in report.rows[::2]:
        assert row.Gap_R >= 0


def test_rule_ablation():
    report = run_rule_ablation("20x8", 3, seed=0, config=FAST)
    assert [r.arm for r in report.rows] == list(RULE_ARMS)
    assert len(report.samples) == 3 * 4
    assert all(s.valid for s in report.samples)
    again = run_rule_ablation("20x8", 3, seed=0, config=FAST)
    assert _without_runtime(report.rows) == _without_runtime(again.rows)


def test_initial_solution_study():
    report = run_initial_solution_study("20x8", 2, seed=1, config=FAST)
    assert [r.arm for r in report.rows] == ["H_Initial", "R_Initial"]
    assert all(s.valid for s in report.samples)


def test_segmentation_study():
    report = run_segmentation_study(["20x8"], 2, seed=0, config=FAST)
    assert [r.arm for r in report.rows] == ["SG", "NonSG", "SG-NonSG"]
    by_arm = {}
    for s in report.samples:
        by_arm.setdefault(s.arm, []).append(s.objective)
    assert by_arm["SG-NonSG"] == [a - b for a, b in zip(by_arm["SG"], by_arm["NonSG"])]


def test_emit_report_files(tmp_path):
    report = run_rule_ablation("20x8", 2, seed=0, config=FAST)
    written = emit_report(report, ["csv", "json", "plotdata"], tmp_path)
    names = sorted(p.name for p in written)
    assert names == sorted([
        "rule_ablation.csv",
        "rule_ablation.json",
        "rule_ablation_a_and_b.dat",
        "rule_ablation_a_and_not_b.dat",
        "rule_ablation_not_a_and_b.dat",
        "rule_ablation_not_a_and_not_b.dat",
    ])

    with open(tmp_path / "rule_ablation.csv") as f:
        table = list(csv.reader(f))
    assert table[0] == CSV_COLUMNS
    assert len(table) == 1 + 4

    loaded = load_report_json(tmp_path / "rule_ablation.json")
    assert loaded.name == "rule_ablation"
    assert [r.arm for r in loaded.rows] == list(RULE_ARMS)
    assert len(loaded.samples) == len(report.samples)

    series = (tmp_path / "rule_ablation_a_and_b.dat").read_text().splitlines()
    assert series[0].startswith("#")
    assert series[2].split()[0] == "20"


def test_plot_series_skip_empty_rows():
    report = StudyReport(name="comparison", rows=[
        ExperimentRow(label="A", N=2, M=3, seed=0, arm="seha", R_max=6, R_min=6, R_mean=6),
        ExperimentRow(label="A", N=2, M=3, seed=0, arm="oracle:refused"),
    ])
    series = plot_series(report)
    assert list(series) == ["seha"]
    assert series["seha"].splitlines()[-1] == "2 6"


def test_unknown_format(tmp_path):
    with pytest.raises(ValueError, match="xlsx"):
        emit_report(StudyReport(name="x"), ["xlsx"], tmp_path)


def test_summary_table():
    report = StudyReport(name="rule_ablation", rows=[
        ExperimentRow(label="20x8", N=20, M=8, seed=0, arm="a&b", R_max=30, R_min=20, R_mean=25),
    ])
    text = format_summary(report)
    assert "Rule Ablation" in text
    assert "| 20x8 | 20 | 8 | 0 | a&b | 30 | 20 | 25 |" in text
