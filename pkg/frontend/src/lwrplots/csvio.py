"""Readers for the solver's documented CSV contracts.

Snapshot files carry columns ``x,rho``; error tables carry
``h,delta,m,rule,flux,kernel,initial,error``.  Any missing file, missing
column, or non-numeric entry raises ``PlotInputError`` naming the file.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class PlotInputError(RuntimeError):
    """An input CSV is missing or does not match its documented schema."""


def _open_rows(path: Path) -> list[dict]:
    if not path.exists():
        raise PlotInputError(f"missing input file: {path}")
    with path.open() as fh:
        try:
            return list(csv.DictReader(fh))
        except csv.Error as exc:
            raise PlotInputError(f"unreadable CSV {path}: {exc}") from None


def read_snapshot(path: Path | str) -> tuple[np.ndarray, np.ndarray]:
    """Read one snapshot CSV into (x, rho) arrays."""
    path = Path(path)
    rows = _open_rows(path)
    if not rows or not {"x", "rho"} <= set(rows[0]):
        raise PlotInputError(f"{path}: expected columns x,rho")
    try:
        x = np.array([float(r["x"]) for r in rows])
        rho = np.array([float(r["rho"]) for r in rows])
    except (TypeError, ValueError) as exc:
        raise PlotInputError(f"{path}: non-numeric snapshot entry ({exc})") from None
    return x, rho


@dataclass(frozen=True)
class ErrorRow:
    h: float
    delta: float
    m: int
    rule: str
    flux: str
    kernel: str
    initial: str
    error: float


_ERROR_COLUMNS = {"h", "delta", "m", "rule", "flux", "kernel", "initial", "error"}


def read_errors_table(path: Path | str) -> list[ErrorRow]:
    """Read an experiment error table."""
    path = Path(path)
    rows = _open_rows(path)
    if not rows or not _ERROR_COLUMNS <= set(rows[0]):
        raise PlotInputError(f"{path}: expected columns {sorted(_ERROR_COLUMNS)}")
    out = []
    try:
        for r in rows:
            out.append(
                ErrorRow(
                    h=float(r["h"]),
                    delta=float(r["delta"]),
                    m=int(r["m"]),
                    rule=r["rule"],
                    flux=r["flux"],
                    kernel=r["kernel"],
                    initial=r["initial"],
                    error=float(r["error"]),
                )
            )
    except (TypeError, ValueError) as exc:
        raise PlotInputError(f"{path}: bad error-table entry ({exc})") from None
    return out


_SNAPSHOT_RE = re.compile(r"snapshot_t(.+)\.csv$")
_REFERENCE_RE = re.compile(r"reference_t(.+)\.csv$")


def _collect(run_dir: Path, pattern: re.Pattern) -> list[tuple[float, Path]]:
    found = []
    for p in sorted(run_dir.glob("*.csv")):
        match = pattern.match(p.name)
        if match:
            try:
                found.append((float(match.group(1)), p))
            except ValueError:
                raise PlotInputError(f"unparseable time in filename: {p}") from None
    return sorted(found)


def discover_run_dir(run_dir: Path | str) -> tuple[list[tuple[float, Path]], list[tuple[float, Path]]]:
    """Locate (time, path) lists of snapshot and reference CSVs in a run dir."""
    run_dir = Path(run_dir)
    if not run_dir.is_dir():
        raise PlotInputError(f"not a run directory: {run_dir}")
    snapshots = _collect(run_dir, _SNAPSHOT_RE)
    references = _collect(run_dir, _REFERENCE_RE)
    if not snapshots:
        raise PlotInputError(f"no snapshot_t*.csv files in {run_dir}")
    return snapshots, references
