"""Result tables, CSV persistence, and optional vector plots."""

from __future__ import annotations

import os
from dataclasses import dataclass

CSV_HEADER = "sweep_var,sweep_value,metric,value,stderr,drops"

PROB_METRICS = ("P_FD", "P_HD", "P_self")
RATE_METRICS = ("avg_rate_FD", "avg_rate_HD")
DOWNLOAD_METRICS = ("avg_download_FD", "avg_download_HD", "outage_frac")
ALL_METRICS = PROB_METRICS + RATE_METRICS + DOWNLOAD_METRICS


@dataclass(frozen=True)
class ResultRow:
    sweep_var: str
    sweep_value: float
    metric: str
    value: float
    stderr: float
    drops: int


@dataclass(frozen=True)
class ResultTable:
    rows: tuple

    def metrics(self) -> tuple:
        seen = []
        for r in self.rows:
            if r.metric not in seen:
                seen.append(r.metric)
        return tuple(seen)

    def series(self, metric: str):
        """(sweep_values, values, stderrs) for one metric, in row order."""
        picked = [r for r in self.rows if r.metric == metric]
        return (
            [r.sweep_value for r in picked],
            [r.value for r in picked],
            [r.stderr for r in picked],
        )


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def write_results(table: ResultTable, path) -> None:
    """Write the table as CSV with 9-significant-digit values."""
    try:
        with open(path, "w") as fh:
            fh.write(CSV_HEADER + "\n")
            for r in table.rows:
                fh.write(
                    f"{r.sweep_var},{_fmt(r.sweep_value)},{r.metric},"
                    f"{_fmt(r.value)},{_fmt(r.stderr)},{r.drops}\n"
                )
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from None


def read_results(path) -> ResultTable:
    """Parse a CSV produced by write_results."""
    try:
        with open(path) as fh:
            lines = [ln.rstrip("\n") for ln in fh]
    except OSError as exc:
        raise OSError(f"cannot read results from {path}: {exc}") from None
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"{path}: missing result header")
    rows = []
    for ln in lines[1:]:
        if not ln:
            continue
        var, sval, metric, value, stderr, drops = ln.split(",")
        rows.append(ResultRow(var, float(sval), metric,
                              float(value), float(stderr), int(drops)))
    return ResultTable(rows=tuple(rows))


def plot_results(table: ResultTable, out_dir, label: str) -> list:
    """One SVG errorbar plot per metric; returns the written paths."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    written = []
    sweep_var = table.rows[0].sweep_var if table.rows else "sweep"
    for metric in table.metrics():
        xs, ys, es = table.series(metric)
        fig, ax = plt.subplots(figsize=(5, 3.5))
        ax.errorbar(xs, ys, yerr=es, marker="o", capsize=3)
        ax.set_xlabel(sweep_var)
        ax.set_ylabel(metric)
        ax.set_title(label)
        ax.grid(True, alpha=0.4)
        fig.tight_layout()
        path = os.path.join(out_dir, f"{label}_{metric}.svg")
        fig.savefig(path)
        plt.close(fig)
        written.append(path)
    return written
