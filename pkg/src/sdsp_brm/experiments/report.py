"""Report emitters: CSV, JSON, plot series and a readable summary."""

import csv
import io
import re
from pathlib import Path
from typing import Any, Dict, List, Sequence, Union

from ..api.codec import canonicalize, dumps_canonical
from ..utils.logging import get_logger
from .studies import ExperimentRow, StudyReport


logger = get_logger(__name__)

CSV_COLUMNS: List[str] = [
    "label", "N", "M", "seed", "arm",
    "R_max", "R_min", "R_mean", "T_mean_s", "Gap_R", "Gap_Rbar",
]

REPORT_FORMATS = ("csv", "json", "plotdata")


def _cell(value: Any) -> str:
    value = canonicalize(value)
    if value is None:
        return ""
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return str(value)


def rows_to_csv(rows: Sequence[ExperimentRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        record = row.model_dump()
        writer.writerow([_cell(record[col]) for col in CSV_COLUMNS])
    return buffer.getvalue()


def report_to_json(report: StudyReport) -> str:
    return dumps_canonical(report.model_dump())


def load_report_json(source: Union[str, Path]) -> StudyReport:
    """Read a report back from its JSON file."""
    return StudyReport.model_validate_json(Path(source).read_text())


def _arm_slug(arm: str) -> str:
    slug = arm.replace("&", "_and_").replace("!", "not_")
    return re.sub(r"[^A-Za-z0-9]+", "_", slug).strip("_")


def plot_series(report: StudyReport) -> Dict[str, str]:
    """
    Per-arm (x = N, y = mean objective) series.

    Returns:
        {arm: whitespace-separated series text}
    """
    series: Dict[str, List[ExperimentRow]] = {}
    for row in report.rows:
        if row.R_mean is not None:
            series.setdefault(row.arm, []).append(row)
    texts: Dict[str, str] = {}
    for arm, rows in series.items():
        lines = [f"# study={report.name} arm={arm}", "# N R_mean"]
        for row in sorted(rows, key=lambda r: (r.N, r.M, r.label, r.seed)):
            lines.append(f"{row.N} {_cell(row.R_mean)}")
        texts[arm] = "\n".join(lines) + "\n"
    return texts


def emit_report(
    report: StudyReport,
    formats: Sequence[str],
    out_dir: Union[str, Path],
) -> List[Path]:
    """
    Write a study report in the requested formats.

    Args:
        report: Study report
        formats: Any of csv, json, plotdata
        out_dir: Output directory (created if needed)

    Returns:
        Paths written, in format order

    Raises:
        ValueError: If a format is unknown
    """
    unknown = [f for f in formats if f not in REPORT_FORMATS]
    if unknown:
        raise ValueError(f"Unknown report format(s): {', '.join(unknown)}")

    target = Path(out_dir)
    target.mkdir(parents=True, exist_ok=True)
    written: List[Path] = []
    for fmt in formats:
        if fmt == "csv":
            path = target / f"{report.name}.csv"
            path.write_text(rows_to_csv(report.rows))
            written.append(path)
        elif fmt == "json":
            path = target / f"{report.name}.json"
            path.write_text(report_to_json(report))
            written.append(path)
        else:
            for arm, text in plot_series(report).items():
                path = target / f"{report.name}_{_arm_slug(arm)}.dat"
                path.write_text(text)
                written.append(path)
    logger.info(f"Wrote {len(written)} report file(s) for {report.name} to {target}")
    return written


def format_summary(report: StudyReport) -> str:
    """Markdown table of the aggregated rows for the terminal."""
    result = f"# 📊 {report.name.replace('_', ' ').title()}\n\n"
    result += "| " + " | ".join(CSV_COLUMNS) + " |\n"
    result += "|" + "---|" * len(CSV_COLUMNS) + "\n"
    for row in report.rows:
        record = row.model_dump()
        result += "| " + " | ".join(_cell(record[c]) or "--" for c in CSV_COLUMNS) + " |\n"

    invalid = [s for s in report.samples if not s.valid]
    if invalid:
        result += f"\n⚠️  {len(invalid)} run(s) produced solutions that failed validation\n"
    return result
