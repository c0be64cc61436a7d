"""Delimited report files for metric results.

An evaluation run produces one TSV per metric (rows = lengths then MICRO,
columns = models plus BASELINE, NA for undefined values) and a meta.tsv
sidecar recording the seen-set reading, per-length domain sizes, and the
rank convention behind the mean-rank score.
"""

from __future__ import annotations

from pathlib import Path

from .errors import InputError
from .metrics import METRICS, MetricReport

MR_RANK_CONVENTION = (
    "descending average ranks over the evaluated domain; rank 1 = largest "
    "model moment; score = 1 - mean(rank of gold-positive entries)/N"
)


def metric_filename(metric: str) -> str:
    return metric.lower().replace("-", "_") + ".tsv"


def format_value(value: float | None) -> str:
    return "NA" if value is None else format(value, ".6g")


def write_metric_table(report: MetricReport, metric: str, path) -> None:
    """One metric as a TSV: header of model columns, rows N<len>.. then MICRO."""
    if metric not in METRICS:
        raise InputError(f"unknown metric {metric!r}; expected one of {METRICS}")
    lines = ["\t".join(["length", *report.models])]
    for n in report.lengths:
        row = [f"N{n}"] + [format_value(report.value(metric, m, n)) for m in report.models]
        lines.append("\t".join(row))
    micro_row = ["MICRO"] + [format_value(report.micro_value(metric, m)) for m in report.models]
    lines.append("\t".join(micro_row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_reports(report: MetricReport, out_dir, extra_meta: dict[str, str] | None = None) -> list[Path]:
    """Write all six metric TSVs plus meta.tsv into out_dir; returns the paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for metric in METRICS:
        path = out_dir / metric_filename(metric)
        write_metric_table(report, metric, path)
        paths.append(path)
    meta_path = out_dir / "meta.tsv"
    rows: list[tuple[str, str]] = [
        ("seen_reading", report.seen_reading),
        ("mr_rank_convention", MR_RANK_CONVENTION),
        ("lengths", ",".join(str(n) for n in report.lengths)),
        ("models", ",".join(report.models)),
    ]
    for n in report.lengths:
        rows.append((f"support_size_n{n}", str(report.support_sizes[n])))
        rows.append((f"gold_nonzero_n{n}", str(report.gold_nonzero[n])))
        rows.append((f"unseen_size_n{n}", str(report.unseen_sizes[n])))
        rows.append((f"unseen_gold_nonzero_n{n}", str(report.unseen_gold_nonzero[n])))
    for key, value in (extra_meta or {}).items():
        rows.append((key, value))
    meta_path.write_text("\n".join(f"{k}\t{v}" for k, v in rows) + "\n")
    paths.append(meta_path)
    return paths


# --- plot series -------------------------------------------------------------
# Rows are ``m<TAB>model<TAB>metric<TAB>value`` with no header; one row per
# (metric, model) MICRO value.  Undefined values are skipped (nothing to plot).

def write_plot_series(report: MetricReport, m: int, path) -> Path:
    lines = []
    for metric in METRICS:
        for model in report.models:
            value = report.micro_value(metric, model)
            if value is None:
                continue
            lines.append(f"{m}\t{model}\t{metric}\t{format_value(value)}")
    path = Path(path)
    path.write_text("\n".join(lines) + "\n" if lines else "")
    return path


def read_plot_series(paths) -> list[tuple[int, str, str, float]]:
    """Parse and merge plot-series files, sorted by (metric, model, m)."""
    rows = []
    for path in paths:
        path = Path(path)
        for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
            if not raw.strip():
                continue
            parts = raw.split("\t")
            if len(parts) != 4:
                raise InputError(f"{path}:{lineno}: expected 'm<TAB>model<TAB>metric<TAB>value'")
            try:
                m = int(parts[0])
                value = float(parts[3])
            except ValueError:
                raise InputError(f"{path}:{lineno}: bad numeric field in {raw!r}") from None
            rows.append((m, parts[1], parts[2], value))
    rows.sort(key=lambda r: (r[2], r[1], r[0]))
    return rows


def write_merged_series(rows, path) -> Path:
    lines = [f"{m}\t{model}\t{metric}\t{format(value, '.6g')}" for m, model, metric, value in rows]
    path = Path(path)
    path.write_text("\n".join(lines) + "\n" if lines else "")
    return path
