"""Uniform-grid finite-volume time stepper for local and nonlocal LWR.

The scheme advances cell averages rho_j by interface fluxes,

    rho_j' = rho_j + lam * (F_{j-1/2} - F_{j+1/2}),
    F_{j+1/2} = g(rho_j, rho_{j+1}, q_j, q_{j+1}),

where q_j = sum_k w_k rho_{j+k} is the discrete look-ahead density and
lam = tau/h is the fixed CFL ratio.  Reads past the stored index range
resolve by constant extension of the boundary cell; the stored range pads
the report window by T + delta + 2h so boundary artifacts cannot reach it
(wave and stencil speeds are bounded by 1 in the scaled model).

Each step is double buffered: the update depends only on the previous
level, so fields are values, never mutated in place, and distinct runs
share nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field
from typing import Callable, Union

import numpy as np

from .diagnostics import Delta0Inputs, delta0
from .errors import DomainError, NumericsError
from .fluxes import FluxFunction, check_assumption5, flux_from_name
from .kernels import Kernel, kernel_from_name
from .quadrature import QuadratureWeights, WeightRule, build_weights, theoretical_gap_constant

# 5-point Gauss-Legendre nodes/weights on [-1, 1]; exact to degree 9, far
# beyond what the piecewise-constant scheme can resolve.
_GL_NODES = np.array(
    [
        -math.sqrt(5.0 + 2.0 * math.sqrt(10.0 / 7.0)) / 3.0,
        -math.sqrt(5.0 - 2.0 * math.sqrt(10.0 / 7.0)) / 3.0,
        0.0,
        math.sqrt(5.0 - 2.0 * math.sqrt(10.0 / 7.0)) / 3.0,
        math.sqrt(5.0 + 2.0 * math.sqrt(10.0 / 7.0)) / 3.0,
    ]
)
_GL_WEIGHTS = np.array(
    [
        (322.0 - 13.0 * math.sqrt(70.0)) / 900.0,
        (322.0 + 13.0 * math.sqrt(70.0)) / 900.0,
        128.0 / 225.0,
        (322.0 + 13.0 * math.sqrt(70.0)) / 900.0,
        (322.0 - 13.0 * math.sqrt(70.0)) / 900.0,
    ]
)


@dataclass(frozen=True)
class Grid:
    """Uniform grid of cells C_j = ((j-1/2)h, (j+1/2)h) centered at x_j = j h."""

    h: float
    lam: float
    j_min: int
    j_max: int
    x_lo: float = 0.0
    x_hi: float = 1.0

    def __post_init__(self):
        if self.h <= 0.0 or self.lam <= 0.0:
            raise DomainError("cell width and CFL ratio must be positive")
        if self.j_max < self.j_min:
            raise DomainError("empty grid index range")

    @property
    def tau(self) -> float:
        return self.lam * self.h

    @property
    def n_cells(self) -> int:
        return self.j_max - self.j_min + 1

    def centers(self) -> np.ndarray:
        return np.arange(self.j_min, self.j_max + 1, dtype=float) * self.h

    def edges(self) -> np.ndarray:
        return (np.arange(self.j_min, self.j_max + 2, dtype=float) - 0.5) * self.h


def build_grid(h: float, lam: float, report_window=(0.0, 1.0), padding: float = 0.0) -> Grid:
    lo, hi = report_window
    if hi <= lo:
        raise DomainError(f"empty report window ({lo}, {hi})")
    j_min = math.floor((lo - padding) / h) - 1
    j_max = math.ceil((hi + padding) / h) + 1
    return Grid(h=h, lam=lam, j_min=j_min, j_max=j_max, x_lo=lo, x_hi=hi)


@dataclass
class SolutionField:
    """Piecewise-constant cell values on a grid at one time level."""

    grid: Grid
    n: int
    values: np.ndarray

    @property
    def time(self) -> float:
        return self.n * self.grid.tau

    def x(self) -> np.ndarray:
        return self.grid.centers()

    def copy(self) -> "SolutionField":
        return SolutionField(self.grid, self.n, self.values.copy())


# ---------------------------------------------------------------------------
# Initial data


@dataclass(frozen=True)
class BellShape:
    """Smooth bump base + amplitude * exp(-sharpness (x - center)^2)."""

    base: float = 0.4
    amplitude: float = 0.4
    sharpness: float = 100.0
    center: float = 0.5

    def evaluate(self, x):
        return self.base + self.amplitude * np.exp(-self.sharpness * (np.asarray(x) - self.center) ** 2)

    def bounds(self) -> tuple[float, float]:
        return self.base, self.base + self.amplitude


@dataclass(frozen=True)
class RiemannData:
    """Constant states separated by a jump (at x = 0.5 by default)."""

    rho_left: float
    rho_right: float
    jump: float = 0.5

    def bounds(self) -> tuple[float, float]:
        lo = min(self.rho_left, self.rho_right)
        return lo, max(self.rho_left, self.rho_right)


@dataclass(frozen=True)
class TableData:
    """Piecewise-constant profile: values[i] on [xs[i], xs[i+1]), extended
    by its end values outside [xs[0], xs[-1]]."""

    xs: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.xs) != len(self.values) + 1:
            raise DomainError("table needs len(xs) == len(values) + 1")
        if any(b <= a for a, b in zip(self.xs, self.xs[1:])):
            raise DomainError("table breakpoints must be strictly increasing")

    def bounds(self) -> tuple[float, float]:
        return min(self.values), max(self.values)


InitialData = Union[BellShape, RiemannData, TableData]


def initial_bounds(data: InitialData) -> tuple[float, float]:
    """Infimum and supremum of the initial profile."""
    return data.bounds()


def one_sided_lipschitz(data: InitialData, resolution: float = 1e-4) -> float:
    """One-sided Lipschitz constant of the initial profile: the supremum of
    -(rho0(y) - rho0(x))/(y - x).

    Zero for profiles with no decreasing part, +inf in the presence of a
    downward jump; smooth profiles are densely sampled at ``resolution``.
    """
    if isinstance(data, RiemannData):
        return 0.0 if data.rho_right >= data.rho_left else math.inf
    if isinstance(data, TableData):
        drops = any(b < a for a, b in zip(data.values, data.values[1:]))
        return math.inf if drops else 0.0
    span = 8.0 / math.sqrt(data.sharpness)
    xs = np.arange(data.center - span, data.center + span, resolution)
    slopes = -np.diff(data.evaluate(xs)) / resolution
    return float(max(0.0, slopes.max()))


def _table_cell_averages(data: TableData, edges: np.ndarray) -> np.ndarray:
    """Cell averages of the table profile as convex combinations of its piece
    values, weighted by overlap lengths.  Normalizing by the summed overlap
    (rather than the nominal cell width) keeps constant profiles bitwise
    constant."""
    lo = np.concatenate([[-math.inf], np.asarray(data.xs)])
    hi = np.concatenate([np.asarray(data.xs), [math.inf]])
    vals = np.concatenate([[data.values[0]], np.asarray(data.values), [data.values[-1]]])
    ref = vals[0]  # accumulating deviations keeps constant profiles bitwise flat
    e1, e2 = edges[:-1], edges[1:]
    acc = np.zeros_like(e1)
    total = np.zeros_like(e1)
    for piece_lo, piece_hi, v in zip(lo, hi, vals):
        overlap = np.clip(np.minimum(e2, piece_hi) - np.maximum(e1, piece_lo), 0.0, None)
        acc += (v - ref) * overlap
        total += overlap
    return ref + acc / total


def discretize_initial(data: InitialData, grid: Grid) -> SolutionField:
    """Exact (closed-form or high-order quadrature) cell averages of rho0."""
    edges = grid.edges()
    h = grid.h
    if isinstance(data, RiemannData):
        left_overlap = np.clip(data.jump - edges[:-1], 0.0, h)
        values = (data.rho_left * left_overlap + data.rho_right * (h - left_overlap)) / h
    elif isinstance(data, TableData):
        values = _table_cell_averages(data, edges)
    else:
        nodes = grid.centers()[:, None] + 0.5 * h * _GL_NODES[None, :]
        values = data.evaluate(nodes) @ (0.5 * _GL_WEIGHTS)
    return SolutionField(grid=grid, n=0, values=np.asarray(values, dtype=float))


# ---------------------------------------------------------------------------
# Spatial update


def interface_fluxes(values: np.ndarray, flux: FluxFunction, weights: QuadratureWeights) -> np.ndarray:
    """Fluxes at the n+1 interfaces bounding n stored cells.

    Ghost reads use constant extension; each flux is computed once and reused
    by both adjacent cells, so conservation holds to roundoff.
    """
    n = values.shape[0]
    ext = np.pad(values, (1, weights.m), mode="edge")
    with np.errstate(invalid="ignore", over="ignore"):
        q = np.correlate(ext, weights.weights, mode="valid")
        return flux.eval(ext[: n + 1], ext[1 : n + 2], q[: n + 1], q[1 : n + 2])


def local_interface_fluxes(values: np.ndarray, flux: FluxFunction) -> np.ndarray:
    """Interface fluxes of the local scheme, g evaluated with q = rho."""
    ext = np.pad(values, (1, 1), mode="edge")
    return flux.eval(ext[:-1], ext[1:], ext[:-1], ext[1:])


def nonlocal_density(field: SolutionField, weights: QuadratureWeights, j: int) -> float:
    """Discrete look-ahead density q_j = sum_k w_k rho_{j+k} at cell j."""
    idx = np.arange(j, j + weights.m) - field.grid.j_min
    idx = np.clip(idx, 0, field.values.shape[0] - 1)
    return float(weights.weights @ field.values[idx])


def _advance(values: np.ndarray, lam: float, fluxes: np.ndarray, n: int) -> tuple[np.ndarray, float, float]:
    # Non-finite inputs are caught below, so let inf/nan flow through silently.
    with np.errstate(invalid="ignore", over="ignore"):
        new = values + lam * (fluxes[:-1] - fluxes[1:])
    if not np.all(np.isfinite(new)):
        bad = int(np.argmin(np.isfinite(new)))
        raise NumericsError(
            f"non-finite cell value at local index {bad} after step {n}", cell_index=bad
        )
    boundary = float(fluxes[0] - fluxes[-1])
    l1_change = float(np.abs(new - values).sum())
    return new, boundary, l1_change


def step(field: SolutionField, flux: FluxFunction, weights: QuadratureWeights) -> SolutionField:
    """One conservative update of the nonlocal scheme over the stored range."""
    fluxes = interface_fluxes(field.values, flux, weights)
    new, _, _ = _advance(field.values, field.grid.lam, fluxes, field.n)
    return SolutionField(field.grid, field.n + 1, new)


def local_step(field: SolutionField, flux: FluxFunction) -> SolutionField:
    """One conservative update of the local scheme (q identified with rho)."""
    fluxes = local_interface_fluxes(field.values, flux)
    new, _, _ = _advance(field.values, field.grid.lam, fluxes, field.n)
    return SolutionField(field.grid, field.n + 1, new)


# ---------------------------------------------------------------------------
# Whole runs


@dataclass(frozen=True)
class RunConfig:
    """Full parameterization of one experiment run."""

    kernel: str
    rule: str
    flux: str
    delta: float
    h: float
    T: float
    initial: InitialData
    lam: float = 0.25
    alpha: float = 2.0
    report_window: tuple[float, float] = (0.0, 1.0)
    snapshot_times: tuple[float, ...] = ()


@dataclass
class RunStats:
    """Per-level and per-step scalar diagnostics recorded during a run."""

    vmin: np.ndarray
    vmax: np.ndarray
    tv: np.ndarray
    lip: np.ndarray
    mass: np.ndarray
    boundary_flux: np.ndarray
    l1_change: np.ndarray


@dataclass
class Snapshot:
    t_requested: float
    t_actual: float
    field: SolutionField


@dataclass
class Trajectory:
    """Result of a run: final field, requested snapshots, diagnostics."""

    config: RunConfig
    grid: Grid
    mode: str  # "nonlocal" | "local"
    flux: FluxFunction
    weights: QuadratureWeights | None
    initial: SolutionField
    final: SolutionField
    snapshots: list[Snapshot]
    stats: RunStats
    n_steps: int
    actual_time: float
    assumption5_margin: float
    delta0_estimate: float | None
    warnings: tuple[str, ...]
    fields: list[SolutionField] | None = None


def _level_stats(values: np.ndarray, h: float) -> tuple[float, float, float, float, float]:
    diffs = np.diff(values)
    tv = float(np.abs(diffs).sum())
    lip = float(max(0.0, -diffs.min() / h)) if diffs.size else 0.0
    return float(values.min()), float(values.max()), tv, lip, float(values.sum() * h)


def _snapshot_levels(times, tau: float, n_steps: int) -> list[tuple[float, int]]:
    out = []
    for t in dict.fromkeys(times):
        if n_steps == 0 or tau == 0.0:
            out.append((t, 0))
            continue
        x = t / tau
        level = math.floor(x + 0.5)
        if x + 0.5 == level:  # exact tie: prefer the earlier level
            level -= 1
        out.append((t, min(max(level, 0), n_steps)))
    return out


def _step_count(T: float, tau: float) -> int:
    n = int(round(T / tau))
    return max(n, 0)


def _run_loop(
    config: RunConfig,
    grid: Grid,
    initial_field: SolutionField,
    flux_at: Callable[[np.ndarray], np.ndarray],
    keep_fields: bool,
) -> tuple:
    n_steps = _step_count(config.T, grid.tau)
    actual_time = n_steps * grid.tau
    times = config.snapshot_times or (0.0, actual_time / 2.0, actual_time)
    wanted = _snapshot_levels(times, grid.tau, n_steps)

    vmin = np.empty(n_steps + 1)
    vmax = np.empty(n_steps + 1)
    tv = np.empty(n_steps + 1)
    lip = np.empty(n_steps + 1)
    mass = np.empty(n_steps + 1)
    boundary = np.empty(n_steps)
    l1_change = np.empty(n_steps)

    snapshots: list[Snapshot] = []
    fields: list[SolutionField] | None = [] if keep_fields else None
    values = initial_field.values
    for n in range(n_steps + 1):
        vmin[n], vmax[n], tv[n], lip[n], mass[n] = _level_stats(values, grid.h)
        current = SolutionField(grid, n, values)
        if keep_fields:
            fields.append(current.copy())
        for t_req, level in wanted:
            if level == n:
                snapshots.append(Snapshot(t_req, n * grid.tau, current.copy()))
        if n < n_steps:
            values, boundary[n], l1_change[n] = _advance(values, grid.lam, flux_at(values), n)

    final = SolutionField(grid, n_steps, values)
    stats = RunStats(vmin, vmax, tv, lip, mass, boundary, l1_change)
    return final, snapshots, stats, n_steps, actual_time, fields


def _horizon_threshold(config: RunConfig, kernel: Kernel) -> float | None:
    """delta0 = c rho_min / (2 L w(0)) from the config's own data; None when
    its ingredients are inapplicable (e.g. zero gap constant, rho_min = 0)."""
    c = theoretical_gap_constant(kernel, WeightRule(config.rule))
    rho_min = initial_bounds(config.initial)[0]
    lip = one_sided_lipschitz(config.initial, resolution=config.h / 10.0)
    try:
        return delta0(Delta0Inputs(c=c, rho_min=rho_min, lip_const=lip, w0=kernel.value_at_zero))
    except DomainError:
        return None


def _validate_run(config: RunConfig) -> None:
    if config.T < 0.0:
        raise DomainError(f"final time must be nonnegative, got {config.T}")
    if config.h <= 0.0 or config.lam <= 0.0 or config.delta <= 0.0:
        raise DomainError("h, lam, and delta must be positive")


def run(config: RunConfig, keep_fields: bool = False) -> Trajectory:
    """Run the nonlocal scheme; collects snapshots and per-step diagnostics."""
    _validate_run(config)
    kernel = kernel_from_name(config.kernel)
    flux = flux_from_name(config.flux, config.alpha)
    weights = build_weights(kernel, config.delta, config.h, config.rule)

    warnings: list[str] = []
    ok5, margin = check_assumption5(flux, config.lam)
    if not ok5:
        warnings.append(
            f"CFL admissibility violated: lam={config.lam} gives margin {margin:.6g} <= 0"
        )
    threshold = _horizon_threshold(config, kernel)
    if threshold is None:
        warnings.append("horizon threshold delta0 undefined for this configuration")
    elif config.delta > threshold:
        warnings.append(
            f"horizon {config.delta} exceeds delta0={threshold:.6g}; "
            "a-priori bounds are not guaranteed"
        )

    padding = config.T + config.delta + 2.0 * config.h
    grid = build_grid(config.h, config.lam, config.report_window, padding)
    initial_field = discretize_initial(config.initial, grid)

    final, snapshots, stats, n_steps, actual_time, fields = _run_loop(
        config, grid, initial_field,
        lambda v: interface_fluxes(v, flux, weights),
        keep_fields,
    )
    if abs(actual_time - config.T) > 1e-9 * max(1.0, abs(config.T)):
        warnings.append(f"final time rounded from {config.T} to {actual_time}")
    return Trajectory(
        config=config,
        grid=grid,
        mode="nonlocal",
        flux=flux,
        weights=weights,
        initial=initial_field,
        final=final,
        snapshots=snapshots,
        stats=stats,
        n_steps=n_steps,
        actual_time=actual_time,
        assumption5_margin=margin,
        delta0_estimate=threshold,
        warnings=tuple(warnings),
        fields=fields,
    )


def run_local_reference(config: RunConfig, keep_fields: bool = False) -> Trajectory:
    """Run the local scheme built from the same flux with q identified with rho."""
    _validate_run(config)
    flux = flux_from_name(config.flux, config.alpha)
    warnings: list[str] = []
    ok5, margin = check_assumption5(flux, config.lam)
    if not ok5:
        warnings.append(
            f"CFL admissibility violated: lam={config.lam} gives margin {margin:.6g} <= 0"
        )
    padding = config.T + config.delta + 2.0 * config.h
    grid = build_grid(config.h, config.lam, config.report_window, padding)
    initial_field = discretize_initial(config.initial, grid)
    final, snapshots, stats, n_steps, actual_time, fields = _run_loop(
        config, grid, initial_field,
        lambda v: local_interface_fluxes(v, flux),
        keep_fields,
    )
    if abs(actual_time - config.T) > 1e-9 * max(1.0, abs(config.T)):
        warnings.append(f"final time rounded from {config.T} to {actual_time}")
    return Trajectory(
        config=config,
        grid=grid,
        mode="local",
        flux=flux,
        weights=None,
        initial=initial_field,
        final=final,
        snapshots=snapshots,
        stats=stats,
        n_steps=n_steps,
        actual_time=actual_time,
        assumption5_margin=margin,
        delta0_estimate=None,
        warnings=tuple(warnings),
        fields=fields,
    )
