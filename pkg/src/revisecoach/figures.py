"""Figure rendering for the report paths.

Each function draws one report onto an Agg-backed Figure and writes a
PNG next to the delimited output. No global pyplot state is touched, so
rendering is safe from library code and headless machines.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from matplotlib.figure import Figure

from .metrics import ClassifierReport, CorpusStatsReport, DeltaReport


def save_confusion_matrix(report: ClassifierReport, path: str | Path, title: str = "") -> Path:
    path = Path(path)
    fig = Figure(figsize=(4.2, 3.6))
    ax = fig.subplots()
    grid = np.array(report.confusion, dtype=float)
    image = ax.imshow(grid, cmap="Blues")
    ax.set_xticks(range(len(report.labels)), report.labels)
    ax.set_yticks(range(len(report.labels)), report.labels)
    ax.set_xlabel("predicted")
    ax.set_ylabel("gold")
    if title:
        ax.set_title(title)
    threshold = grid.max() / 2.0 if grid.size else 0.0
    for i in range(grid.shape[0]):
        for j in range(grid.shape[1]):
            color = "white" if grid[i, j] > threshold else "black"
            ax.text(j, i, f"{int(grid[i, j])}", ha="center", va="center", color=color)
    fig.colorbar(image, ax=ax, fraction=0.046)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    return path


def save_grade_breakdown(report: ClassifierReport, path: str | Path, title: str = "") -> Path:
    """Grouped bars of per-grade precision/recall/F1 for the positive class."""
    path = Path(path)
    grades = sorted(report.per_grade)
    fig = Figure(figsize=(max(4.0, 1.2 * len(grades) + 2), 3.4))
    ax = fig.subplots()
    if grades:
        xs = np.arange(len(grades))
        width = 0.27
        for offset, (attr, label) in enumerate(
            [("precision", "precision"), ("recall", "recall"), ("f1", "F1")]
        ):
            values = [getattr(report.per_grade[g], attr) for g in grades]
            ax.bar(xs + (offset - 1) * width, values, width, label=label)
        ax.set_xticks(xs, grades)
        ax.legend(fontsize=8)
    ax.set_ylim(0, 1.05)
    ax.set_xlabel("grade")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    return path


def save_delta_chart(report: DeltaReport, path: str | Path, title: str = "") -> Path:
    """Old-vs-new indicator means per feedback level."""
    path = Path(path)
    fig = Figure(figsize=(6.4, 3.4))
    axes = fig.subplots(1, 2)
    levels = [r.level for r in report.rows]
    xs = np.arange(len(levels))
    width = 0.38
    for ax, old_attr, new_attr, name in (
        (axes[0], "npe_old", "npe_new", "topic count"),
        (axes[1], "spc_old", "spc_new", "specificity"),
    ):
        ax.bar(xs - width / 2, [getattr(r, old_attr) for r in report.rows], width, label="old")
        ax.bar(xs + width / 2, [getattr(r, new_attr) for r in report.rows], width, label="new")
        ax.set_xticks(xs, levels)
        ax.set_title(name, fontsize=9)
        ax.legend(fontsize=8)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    return path


def save_corpus_stats_chart(report: CorpusStatsReport, path: str | Path, title: str = "") -> Path:
    """Mean revision-action counts per grade, one panel per draft pair."""
    path = Path(path)
    panels = max(1, report.max_pairs)
    fig = Figure(figsize=(4.2 * panels, 3.4))
    axes = fig.subplots(1, panels) if panels > 1 else [fig.subplots()]
    rows = [r for r in report.rows if r.grade != "overall"]
    grades = [r.grade for r in rows]
    xs = np.arange(len(grades))
    width = 0.27
    for i in range(panels):
        ax = axes[i]
        for offset, attr in enumerate(("adds", "deletes", "modifies")):
            values = [
                getattr(r.pair_stats[i], attr) if i < len(r.pair_stats) and r.pair_stats[i] else 0.0
                for r in rows
            ]
            ax.bar(xs + (offset - 1) * width, values, width, label=attr)
        ax.set_xticks(xs, grades)
        ax.set_xlabel("grade")
        ax.set_title(f"draft {i + 1} to {i + 2}", fontsize=9)
        ax.legend(fontsize=8)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    return path
