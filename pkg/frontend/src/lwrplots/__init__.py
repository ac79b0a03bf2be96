"""Regenerates figures from solver CSV outputs; never recomputes numerics."""

from .csvio import PlotInputError, read_errors_table, read_snapshot
from .figures import FigureSpec, convergence_figure, plot_convergence, plot_snapshots, snapshot_figure

__version__ = "0.1.0"
