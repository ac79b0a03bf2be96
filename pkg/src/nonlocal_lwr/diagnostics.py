"""Runtime verification of the scheme's proven properties and error norms.

The checks mirror the a-priori estimates the solver is designed to satisfy
when the weight/flux/CFL admissibility conditions hold and the horizon stays
below the threshold delta0 = c rho_min / (2 L w(0)):

* maximum principle and total variation decay, per step;
* the one-sided Lipschitz (entropy) decay L^n <= 1/(1/L^0 + 2 n tau);
* L1 distances between piecewise-constant fields on nested grids, and
  least-squares convergence rates from (h, error) tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

_EXACT_TOL = 1e-12


@dataclass(frozen=True)
class Delta0Inputs:
    """Ingredients of the horizon threshold: weight-gap constant c, infimum
    of the initial data, its one-sided Lipschitz constant, and w(0)."""

    c: float
    rho_min: float
    lip_const: float
    w0: float


def delta0(inputs: Delta0Inputs) -> float:
    """Horizon threshold c rho_min / (2 L w(0)); +inf when L = 0 (profiles
    with no decreasing part impose no restriction)."""
    if inputs.c <= 0.0 or inputs.rho_min <= 0.0 or inputs.w0 <= 0.0:
        raise DomainError(
            f"threshold requires positive c, rho_min, w0; got {inputs}"
        )
    if inputs.lip_const < 0.0:
        raise DomainError(f"negative Lipschitz constant {inputs.lip_const}")
    if inputs.lip_const == 0.0:
        return math.inf
    return inputs.c * inputs.rho_min / (2.0 * inputs.lip_const * inputs.w0)


def total_variation(field) -> float:
    """Sum of |rho_{j+1} - rho_j| over the stored range."""
    values = np.asarray(getattr(field, "values", field), dtype=float)
    return float(np.abs(np.diff(values)).sum())


@dataclass(frozen=True)
class TvdReport:
    ok: bool
    max_step_increase: float
    first_violation: int | None
    increment_ok: bool
    spacetime_total: float
    spacetime_ok: bool


def _tv_series(trajectory) -> tuple[np.ndarray, np.ndarray]:
    """Per-level TV and per-step L1 time increments, recomputed from retained
    fields when available so corrupted trajectories are caught."""
    if trajectory.fields is not None:
        values = [f.values for f in trajectory.fields]
        tv = np.array([total_variation(v) for v in values])
        l1 = np.array([np.abs(b - a).sum() for a, b in zip(values, values[1:])])
        return tv, l1
    return trajectory.stats.tv, trajectory.stats.l1_change


def check_tvd(trajectory, tol: float = _EXACT_TOL) -> TvdReport:
    """Verify per-step TV decay plus the time-increment and space-time bounds."""
    tv, l1 = _tv_series(trajectory)
    increases = np.diff(tv)
    max_inc = float(increases.max()) if increases.size else 0.0
    violating = np.nonzero(increases > tol)[0]
    first = int(violating[0]) if violating.size else None

    sup = trajectory.flux.theta_sup_norms()
    wsum = trajectory.weights.weight_sum if trajectory.weights is not None else 1.0
    factor = trajectory.grid.lam * (sup[0] + sup[1] + (sup[2] + sup[3]) * max(1.0, wsum))
    increment_ok = bool(
        np.all(l1 <= factor * tv[:-1] + tol) and np.all(l1 <= tv[0] + tol)
    )

    spacetime = float(trajectory.grid.tau * tv[:-1].sum()) if tv.size > 1 else 0.0
    spacetime_ok = spacetime <= trajectory.actual_time * tv[0] + tol
    return TvdReport(
        ok=first is None,
        max_step_increase=max(0.0, max_inc),
        first_violation=first,
        increment_ok=increment_ok,
        spacetime_total=spacetime,
        spacetime_ok=spacetime_ok,
    )


@dataclass(frozen=True)
class LipschitzTrace:
    """One-sided Lipschitz constants per level against their decay bound.

    ``applies`` records whether delta <= delta0 held, ``strict`` whether the
    mesh was below the surrogate threshold h0 for the decay estimate; when it was not,
    decay violations are reported as warnings instead of failures.
    """

    L0: float
    Ln: np.ndarray
    bound: np.ndarray
    applies: bool
    strict: bool
    ok: bool
    violations: tuple[tuple[int, str, float], ...]
    warnings: tuple[tuple[int, str, float], ...]


def check_lipschitz(trajectory, inputs: Delta0Inputs, tol: float = _EXACT_TOL) -> LipschitzTrace:
    """Check r_j^n >= -L h and the decay L^n <= 1/(1/L^0 + 2 n tau)."""
    if trajectory.fields is not None:
        h = trajectory.grid.h
        lip = np.array(
            [max(0.0, -np.diff(f.values).min() / h) for f in trajectory.fields]
        )
    else:
        lip = trajectory.stats.lip
    L0 = float(lip[0])
    n = np.arange(lip.shape[0], dtype=float)
    tau = trajectory.grid.tau
    with np.errstate(divide="ignore"):
        bound = 1.0 / (np.divide(1.0, L0) + 2.0 * n * tau) if L0 > 0.0 else np.zeros_like(n)

    threshold = delta0(inputs)
    applies = trajectory.config.delta <= threshold
    h0 = trajectory.assumption5_margin * (threshold - trajectory.config.delta) / 4.0
    strict = math.isfinite(h0) and trajectory.grid.h < h0

    violations: list[tuple[int, str, float]] = []
    warnings: list[tuple[int, str, float]] = []
    if applies:
        limit = inputs.lip_const + tol / trajectory.grid.h
        for k in np.nonzero(lip > limit)[0]:
            violations.append((int(k), "one_sided_bound", float(lip[k])))
        for k in np.nonzero(lip > bound + tol)[0]:
            entry = (int(k), "decay_bound", float(lip[k] - bound[k]))
            (violations if strict else warnings).append(entry)
    return LipschitzTrace(
        L0=L0,
        Ln=lip,
        bound=bound,
        applies=applies,
        strict=strict,
        ok=not violations,
        violations=tuple(violations),
        warnings=tuple(warnings),
    )


# ---------------------------------------------------------------------------
# Error norms and rates


def _refinement_ratio(h_a: float, h_b: float) -> int:
    ratio = max(h_a, h_b) / min(h_a, h_b)
    nearest = round(ratio)
    if nearest < 1 or abs(ratio - nearest) > 1e-9 * nearest:
        raise DomainError(f"grids do not nest: cell widths {h_a} and {h_b}")
    return int(nearest)


def _lookup(field, xs: np.ndarray) -> np.ndarray:
    """Piecewise-constant values at points strictly inside cells, with
    constant extension beyond the stored range."""
    grid = field.grid
    idx = np.round(xs / grid.h).astype(int) - grid.j_min
    return field.values[np.clip(idx, 0, field.values.shape[0] - 1)]


def l1_error(a, b, window: tuple[float, float] | None = None) -> float:
    """Exact L1 distance of two piecewise-constant fields over a window.

    The integrand is split at every cell edge of both grids (equivalently,
    both fields are injected onto their common refinement), so the result is
    exact up to roundoff whether or not the coarse edges align with fine ones.
    """
    _refinement_ratio(a.grid.h, b.grid.h)
    t_a, t_b = a.n * a.grid.tau, b.n * b.grid.tau
    if abs(t_a - t_b) > 1e-9 * max(1.0, abs(t_a)):
        raise DomainError(f"fields are at different times: {t_a} vs {t_b}")
    if window is None:
        window = (b.grid.x_lo, b.grid.x_hi)
    lo, hi = window
    if hi <= lo:
        raise DomainError(f"empty window ({lo}, {hi})")

    cuts = [np.array([lo, hi])]
    for f in (a, b):
        e = f.grid.edges()
        cuts.append(e[(e > lo) & (e < hi)])
    edges = np.unique(np.concatenate(cuts))
    mids = 0.5 * (edges[:-1] + edges[1:])
    lengths = np.diff(edges)
    return float(np.abs(_lookup(a, mids) - _lookup(b, mids)) @ lengths)


def fit_rate(pairs) -> tuple[float, float]:
    """Least-squares slope/intercept of log(error) against log(h).

    Slope +1 means first order: error proportional to h.
    """
    pairs = list(pairs)
    if len(pairs) < 2:
        raise DomainError("rate fit needs at least two (h, error) pairs")
    h = np.array([p[0] for p in pairs], dtype=float)
    err = np.array([p[1] for p in pairs], dtype=float)
    if np.any(h <= 0.0) or np.any(err <= 0.0):
        raise DomainError("rate fit needs positive mesh sizes and errors")
    slope, intercept = np.polyfit(np.log(h), np.log(err), 1)
    return float(slope), float(intercept)


def run_summary(trajectory) -> dict:
    """Compact JSON-ready digest of a run's recorded diagnostics."""
    s = trajectory.stats
    if s.boundary_flux.size:
        mass_change = np.diff(s.mass)
        residual = float(
            np.abs(mass_change - trajectory.grid.tau * s.boundary_flux).max()
        )
    else:
        residual = 0.0
    tv_inc = float(np.diff(s.tv).max()) if s.tv.size > 1 else 0.0
    return {
        "min_value": float(s.vmin.min()),
        "max_value": float(s.vmax.max()),
        "initial_tv": float(s.tv[0]),
        "final_tv": float(s.tv[-1]),
        "max_tv_step_increase": max(0.0, tv_inc),
        "max_conservation_residual": residual,
        "initial_lipschitz": float(s.lip[0]),
        "final_lipschitz": float(s.lip[-1]),
        "n_steps": trajectory.n_steps,
        "actual_time": trajectory.actual_time,
        "warnings": list(trajectory.warnings),
    }
