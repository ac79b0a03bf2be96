"""Figure builders: snapshot overlays and log-log convergence panels.

Everything here renders data read from CSV files as-is.  Axis ranges derive
from the data, SVG output omits timestamps, and random state is never
touched, so byte-identical inputs give identical figures.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .csvio import ErrorRow, PlotInputError, discover_run_dir, read_errors_table, read_snapshot

plt.rcParams["svg.hashsalt"] = "lwr-plots"

_SERIES_COLORS = ("tab:blue", "tab:orange", "tab:green", "tab:red", "tab:purple", "tab:brown")


class FigureId(str, Enum):
    SNAPSHOTS = "snapshots"
    CONVERGENCE = "convergence"


@dataclass
class FigureSpec:
    figure_id: FigureId
    inputs: list[Path]
    output: Path
    group_by: str = "auto"  # convergence series axis: auto | m | delta
    title: str | None = None
    png: bool = False


def save_figure(fig, output: Path, png: bool = False) -> Path:
    output = Path(output)
    output.parent.mkdir(parents=True, exist_ok=True)
    if png or output.suffix.lower() == ".png":
        fig.savefig(output, dpi=150)
    else:
        fig.savefig(output, format="svg", metadata={"Date": None})
    plt.close(fig)
    return output


# ---------------------------------------------------------------------------
# Snapshot overlays


def snapshot_figure(
    snapshots: list[tuple[float, Path]],
    references: list[tuple[float, Path]] | None = None,
    title: str | None = None,
):
    """Solid curve per snapshot time, dashed overlay per reference curve."""
    if not snapshots:
        raise PlotInputError("no snapshot files given")
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for t, path in snapshots:
        x, rho = read_snapshot(path)
        (line,) = ax.plot(x, rho, "-", linewidth=1.4, label=f"t={t:g}")
        line.set_gid(f"snapshot-t{t:g}")
    for t, path in references or []:
        x, rho = read_snapshot(path)
        (line,) = ax.plot(x, rho, "--", color="black", linewidth=1.2,
                          label=f"local reference (t={t:g})")
        line.set_gid("local-reference")
    ax.set_xlabel("x")
    ax.set_ylabel("rho")
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return fig


def plot_snapshots(spec: FigureSpec) -> Path:
    """Render a run directory's snapshots (plus reference overlay if present)."""
    if len(spec.inputs) != 1:
        raise PlotInputError("snapshots figure expects exactly one run directory")
    snapshots, references = discover_run_dir(spec.inputs[0])
    fig = snapshot_figure(snapshots, references, title=spec.title)
    return save_figure(fig, spec.output, spec.png)


# ---------------------------------------------------------------------------
# Convergence panels


def _series_axis(rows: list[ErrorRow], group_by: str) -> str:
    if group_by in ("m", "delta"):
        return group_by
    # A grouping axis is usable when every group covers the full h-ladder.
    hs = sorted({r.h for r in rows})

    def covers(axis):
        groups: dict = {}
        for r in rows:
            groups.setdefault(getattr(r, axis), set()).add(r.h)
        return len(groups) > 1 and all(g == set(hs) for g in groups.values())

    if covers("m"):
        return "m"
    if covers("delta"):
        return "delta"
    return "m"


def _panel_key_columns(rows: list[ErrorRow]) -> list[str]:
    return [c for c in ("rule", "kernel", "initial") if len({getattr(r, c) for r in rows}) > 1]


def convergence_figure(rows: list[ErrorRow], group_by: str = "auto", title: str | None = None):
    """Log-log error against 1/h, one color per series, slope -1 dashed guide.

    When the table mixes rules/kernels/initial profiles, each combination
    gets its own panel.
    """
    if not rows:
        raise PlotInputError("empty error table")
    axis = _series_axis(rows, group_by)
    panel_cols = _panel_key_columns(rows)
    keys = sorted({tuple(getattr(r, c) for c in panel_cols) for r in rows})
    ncols = min(3, len(keys))
    nrows = (len(keys) + ncols - 1) // ncols
    fig, axes = plt.subplots(
        nrows, ncols, figsize=(4.2 * ncols, 3.4 * nrows), squeeze=False
    )

    for idx, key in enumerate(keys):
        ax = axes[idx // ncols][idx % ncols]
        panel_rows = [
            r for r in rows if tuple(getattr(r, c) for c in panel_cols) == key
        ]
        guide_anchor = None
        for si, value in enumerate(sorted({getattr(r, axis) for r in panel_rows})):
            series = sorted(
                (r for r in panel_rows if getattr(r, axis) == value),
                key=lambda r: r.h, reverse=True,
            )
            inv_h = np.array([1.0 / r.h for r in series])
            err = np.array([r.error for r in series])
            label = f"{axis}={value:g}" if isinstance(value, float) else f"{axis}={value}"
            (line,) = ax.loglog(
                inv_h, err, "o-", color=_SERIES_COLORS[si % len(_SERIES_COLORS)],
                markersize=4, linewidth=1.2, label=label,
            )
            line.set_gid(f"series-{axis}-{value}")
            if guide_anchor is None:
                guide_anchor = (inv_h[0], err[0])

        x0, y0 = guide_anchor
        gx = np.array([min(1.0 / r.h for r in panel_rows), max(1.0 / r.h for r in panel_rows)])
        (guide,) = ax.loglog(gx, y0 * x0 / gx, "--", color="gray", linewidth=1.0,
                             label="slope -1")
        guide.set_gid("slope-guide")
        ax.set_xlabel("1/h")
        ax.set_ylabel("L1 error")
        if panel_cols:
            ax.set_title(", ".join(f"{c}={v}" for c, v in zip(panel_cols, key)), fontsize=9)
        ax.legend(fontsize=7)

    for idx in range(len(keys), nrows * ncols):
        axes[idx // ncols][idx % ncols].set_axis_off()
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    return fig


def plot_convergence(spec: FigureSpec) -> Path:
    """Render an experiment's errors.csv as log-log convergence panels."""
    if len(spec.inputs) != 1:
        raise PlotInputError("convergence figure expects one errors.csv or experiment directory")
    target = Path(spec.inputs[0])
    if target.is_dir():
        target = target / "errors.csv"
    rows = read_errors_table(target)
    fig = convergence_figure(rows, group_by=spec.group_by, title=spec.title)
    return save_figure(fig, spec.output, spec.png)
