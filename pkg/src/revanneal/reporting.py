"""Tables, plot data and correlation statistics for campaign results.

Emits the benchmark table (instance, best energy, energy under the parent's
objective, Hamming decomposition), per-target transfer tables with the
better-than-control flagging rule, long-form boxplot CSVs sorted by a chosen
closeness metric, and Spearman rank correlations between closeness metrics
and transfer performance.  Figures are rendered with matplotlib to files
alongside the delimited output.
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .experiments import CONTROL_LABEL, BaselineRecord, TransferRecord

SORT_KEYS = ("energy_gap", "hamming")
METRICS = ("energy_gap", "hamming_total", "hamming_items")


@dataclass(frozen=True)
class CorrelationReport:
    metric: str
    spearman_rho: float
    sample_count: int


def _fmt(x: float | None) -> str:
    if x is None:
        return CONTROL_LABEL
    if x == int(x):
        return str(int(x))
    return f"{x:g}"


def emit_benchmark_table(records: Sequence[BaselineRecord]) -> tuple[str, str]:
    """Benchmark table as (markdown, csv).  Parents carry "--" in the
    closeness columns; cells follow the "-10712 (4)" / "9 (7, 2)" shapes."""
    md = io.StringIO()
    md.write("| Instance | Best energy | Energy wrt parent | Hamming distance |\n")
    md.write("|---|---|---|---|\n")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["instance", "best_energy", "energy_cross", "energy_gap", "h", "n_h", "s_h"]
    )
    for rec in records:
        if rec.error is not None:
            md.write(f"| {rec.instance} | error: {rec.error} | -- | -- |\n")
            writer.writerow([rec.instance, "", "", "", "", "", ""])
            continue
        if rec.closeness is None:
            md.write(f"| {rec.instance} | {_fmt(rec.best_energy)} | -- | -- |\n")
            writer.writerow([rec.instance, repr(rec.best_energy), "", "", "", "", ""])
        else:
            c = rec.closeness
            md.write(
                f"| {rec.instance} | {_fmt(rec.best_energy)} "
                f"| {_fmt(c.energy_cross)} ({_fmt(c.energy_gap)}) "
                f"| {c.h} ({c.n_h}, {c.s_h}) |\n"
            )
            writer.writerow(
                [
                    rec.instance,
                    repr(rec.best_energy),
                    repr(c.energy_cross),
                    repr(c.energy_gap),
                    c.h,
                    c.n_h,
                    c.s_h,
                ]
            )
    return md.getvalue(), buf.getvalue()


def emit_transfer_table(records: Sequence[TransferRecord]) -> tuple[str, str]:
    """Transfer table as (markdown, csv).  Values that equalize or improve on
    the forward-anneal control row are bolded in the markdown and flagged in
    the csv."""
    control = next((r for r in records if r.source == CONTROL_LABEL), None)

    def cell(value: float | None, ref: float | None, decimals: int | None = None) -> str:
        if value is None:
            return "--"
        text = _fmt(value) if decimals is None else f"{value:.{decimals}f}"
        if ref is not None and value <= ref:
            return f"**{text}**"
        return text

    md = io.StringIO()
    md.write("| Source of Knowledge | (best, avg., st.) |\n")
    md.write("|---|---|\n")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["source", "best", "avg", "std", "best_flag", "avg_flag", "std_flag", "skipped", "reason"]
    )
    for rec in records:
        if rec.skipped:
            md.write(f"| {rec.source} | skipped: {rec.reason} |\n")
            writer.writerow([rec.source, "", "", "", "", "", "", True, rec.reason])
            continue
        is_control = rec.source == CONTROL_LABEL
        ref_best = None if is_control or control is None else control.best
        ref_avg = None if is_control or control is None else control.avg
        ref_std = None if is_control or control is None else control.std
        md.write(
            f"| {rec.source} | ({cell(rec.best, ref_best)}, "
            f"{cell(rec.avg, ref_avg, 2)}, {cell(rec.std, ref_std, 2)}) |\n"
        )
        writer.writerow(
            [
                rec.source,
                repr(rec.best),
                repr(rec.avg),
                repr(rec.std),
                "" if ref_best is None else rec.best <= ref_best,
                "" if ref_avg is None else rec.avg <= ref_avg,
                "" if ref_std is None else rec.std <= ref_std,
                False,
                "",
            ]
        )
    return md.getvalue(), buf.getvalue()


@dataclass(frozen=True)
class BoxplotGroup:
    position: int
    source: str
    metric_value: float | None
    run_bests: tuple[float, ...]


def boxplot_groups(
    transfer_records: Sequence[TransferRecord],
    baseline_records: Sequence[BaselineRecord],
    sort_key: str,
) -> list[BoxplotGroup]:
    """Per-source run-best distributions ordered ascending by the closeness
    metric; the forward-anneal control group always comes first."""
    if sort_key not in SORT_KEYS:
        raise ValueError(f"sort_key must be one of {SORT_KEYS}, got {sort_key!r}")
    closeness = {
        rec.instance: rec.closeness for rec in baseline_records if rec.closeness is not None
    }
    groups: list[tuple[float, str, tuple[float, ...]]] = []
    control: tuple[float, ...] | None = None
    for rec in transfer_records:
        if rec.skipped:
            continue
        if rec.source == CONTROL_LABEL:
            control = rec.run_bests
            continue
        cl = closeness.get(rec.source)
        if cl is None:
            warnings.warn(f"{rec.source}: no closeness metrics; group omitted", stacklevel=2)
            continue
        value = cl.energy_gap if sort_key == "energy_gap" else float(cl.h)
        groups.append((value, rec.source, rec.run_bests))
    groups.sort(key=lambda g: (g[0], g[1]))
    out = []
    pos = 0
    if control is not None:
        out.append(BoxplotGroup(pos, CONTROL_LABEL, None, control))
        pos += 1
    for value, source, bests in groups:
        out.append(BoxplotGroup(pos, source, value, bests))
        pos += 1
    return out


def boxplot_csv(groups: Sequence[BoxplotGroup], sort_key: str) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["position", "source", "sort_key", "metric_value", "run", "run_best"])
    for g in groups:
        for run, best in enumerate(g.run_bests):
            writer.writerow(
                [
                    g.position,
                    g.source,
                    sort_key,
                    "" if g.metric_value is None else repr(g.metric_value),
                    run,
                    repr(best),
                ]
            )
    return buf.getvalue()


def render_boxplots(
    groups: Sequence[BoxplotGroup],
    path: str | Path,
    title: str,
    sort_key: str,
) -> None:
    """Render grouped run-best boxplots to an image file; the control group is
    drawn in blue."""
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(max(6.0, 0.55 * len(groups) + 2.0), 4.0))
    data = [list(g.run_bests) for g in groups]
    labels = [
        g.source if g.metric_value is None else f"{g.source}\n[{_fmt(g.metric_value)}]"
        for g in groups
    ]
    boxes = ax.boxplot(data, tick_labels=labels, patch_artist=True)
    for i, patch in enumerate(boxes["boxes"]):
        is_control = groups[i].source == CONTROL_LABEL
        patch.set_facecolor("tab:blue" if is_control else "white")
        patch.set_alpha(0.7 if is_control else 1.0)
    ax.set_ylabel("run-best energy")
    ax.set_xlabel(f"source (sorted by {sort_key})")
    ax.set_title(title)
    ax.tick_params(axis="x", labelrotation=90, labelsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _average_ranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size, dtype=np.float64)
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Spearman rank correlation with average ranks for ties."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.size != y.size or x.size < 3:
        raise ValueError("need at least 3 paired samples")
    rx = _average_ranks(x)
    ry = _average_ranks(y)
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    denom = float(np.sqrt((dx * dx).sum() * (dy * dy).sum()))
    if denom == 0.0:
        return float("nan")
    return float((dx * dy).sum() / denom)


def correlation(
    transfer_records: Sequence[TransferRecord],
    baseline_records: Sequence[BaselineRecord],
) -> list[CorrelationReport]:
    """Spearman rho between each closeness metric of the sources and the mean
    per-run best they achieve on the target (lower energy = better, so a
    positive rho for Hamming distance reproduces a degradation trend)."""
    closeness = {
        rec.instance: rec.closeness for rec in baseline_records if rec.closeness is not None
    }
    pairs: list[tuple[str, float]] = []
    for rec in transfer_records:
        if rec.skipped or rec.source == CONTROL_LABEL or rec.source not in closeness:
            continue
        pairs.append((rec.source, rec.avg))
    if len(pairs) < 3:
        raise ValueError(f"need at least 3 source records with closeness, got {len(pairs)}")
    out = []
    for metric in METRICS:
        xs = []
        ys = []
        for source, avg in pairs:
            cl = closeness[source]
            if metric == "energy_gap":
                xs.append(cl.energy_gap)
            elif metric == "hamming_total":
                xs.append(float(cl.h))
            else:
                xs.append(float(cl.n_h))
            ys.append(avg)
        out.append(CorrelationReport(metric, spearman(xs, ys), len(xs)))
    return out
