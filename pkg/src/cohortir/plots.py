"""Render evaluation reports as matplotlib figures.

Two files per report: a per-topic bar chart grid (one panel per metric)
and a macro-average summary chart. Written alongside the table/JSONL
output by the eval and run-all commands.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .metrics import EvalReport, _metric_columns


def render_eval_figures(
    report: EvalReport, out_dir: str | Path, prefix: str = "eval"
) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    columns = _metric_columns(report.ks)
    written = []

    topic_ids = [ev.topic_id for ev in report.topics]
    if topic_ids:
        ncols = 2
        nrows = (len(columns) + ncols - 1) // ncols
        fig, axes = plt.subplots(
            nrows, ncols, figsize=(max(8, 0.5 * len(topic_ids) + 4), 2.4 * nrows)
        )
        flat = axes.ravel()
        records = [ev.as_record() for ev in report.topics]
        for ax, column in zip(flat, columns):
            ax.bar(range(len(topic_ids)), [float(r[column]) for r in records])
            ax.set_title(column)
            ax.set_ylim(0, 1.05)
            ax.set_xticks(range(len(topic_ids)))
            ax.set_xticklabels(topic_ids, rotation=90, fontsize=6)
        for ax in flat[len(columns):]:
            ax.axis("off")
        fig.tight_layout()
        path = out / f"{prefix}_per_topic.png"
        fig.savefig(path, dpi=100)
        plt.close(fig)
        written.append(path)

    fig, ax = plt.subplots(figsize=(6, 3))
    values = [report.macro[c] for c in columns]
    ax.bar(columns, values)
    ax.set_ylim(0, 1.05)
    ax.set_title(f"macro averages over {len(report.topics)} topics")
    for i, value in enumerate(values):
        ax.text(i, value + 0.02, f"{value:.3f}", ha="center", fontsize=7)
    fig.tight_layout()
    path = out / f"{prefix}_summary.png"
    fig.savefig(path, dpi=100)
    plt.close(fig)
    written.append(path)
    return written
