"""Figure rendering for metric reports and training-size curves.

Renders PNGs next to the delimited output: per-metric lines over subsequence
lengths for a single report, and per-metric lines over training size m for
merged plot-series rows.  Uses the Agg backend so it works headless.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .metrics import METRICS, MetricReport


def _save(fig, path: Path) -> Path:
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def render_report_figures(report: MetricReport, out_dir) -> list[Path]:
    """One PNG per metric: metric value vs subsequence length, line per model."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    x = list(report.lengths)
    for metric in METRICS:
        fig, ax = plt.subplots(figsize=(5.0, 3.4))
        for model in report.models:
            y = [
                np.nan if report.value(metric, model, n) is None else report.value(metric, model, n)
                for n in report.lengths
            ]
            ax.plot(x, y, marker="o", label=model)
        ax.set_xlabel("subsequence length n")
        ax.set_ylabel(metric)
        ax.set_xticks(x)
        ax.grid(True, alpha=0.3)
        if report.models:
            ax.legend(fontsize=8)
        fig.tight_layout()
        paths.append(_save(fig, out_dir / (metric.lower().replace("-", "_") + ".png")))
    return paths


def render_curve_figures(rows, out_dir) -> list[Path]:
    """One PNG per metric found in plot-series rows: MICRO value vs training size."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    by_metric: dict[str, dict[str, list[tuple[int, float]]]] = {}
    for m, model, metric, value in rows:
        by_metric.setdefault(metric, {}).setdefault(model, []).append((m, value))
    paths = []
    for metric in sorted(by_metric):
        fig, ax = plt.subplots(figsize=(5.0, 3.4))
        for model in sorted(by_metric[metric]):
            points = sorted(by_metric[metric][model])
            ax.plot([p[0] for p in points], [p[1] for p in points], marker="o", label=model)
        ax.set_xlabel("training size m")
        ax.set_ylabel(f"{metric} (MICRO)")
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize=8)
        fig.tight_layout()
        paths.append(_save(fig, out_dir / (metric.lower().replace("-", "_") + "_vs_m.png")))
    return paths
