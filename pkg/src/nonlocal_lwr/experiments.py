"""Experiment sweeps, reference solves, and output layout.

Four canned experiments drive the solver over the parameter grids used for
its verification studies; all parameters can be overridden, the defaults
reproduce the full-scale sweeps:

1. snapshots    delta=0.005, h=0.001, T=1, lf flux, all weight rules, both
                initial profiles; local reference on h=0.0002.
2. local limit  delta = m h for m in {1,2,5}, h = 0.01 * 2^-l (l=0..3),
                errors against a fine local reference (h = 0.01 * 2^-5).
3. uniform in delta   fixed delta in {0.01, 0.005, 0.0025}, same h ladder,
                errors against fine nonlocal references at the same delta.
4. kernels      exact weights, the three kernel profiles, exp-2 sweep.

Outputs per run live in ``<out>/<experiment>/<config-hash>/``: window
snapshots as ``snapshot_t*.csv`` (columns x,rho), ``meta.json`` echoing the
exact configuration plus derived quantities, and ``diagnostics.json``.  The
experiment root collects ``errors.csv`` (columns
h,delta,m,rule,flux,kernel,initial,error) and ``summary.json``.  Sweep
entries are independent; ``jobs > 1`` runs them in a process pool.
"""

from __future__ import annotations

import csv
import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .diagnostics import l1_error, run_summary
from .errors import ConfigError
from .kernels import kernel_from_name
from .quadrature import build_weights
from .solver import (
    BellShape,
    InitialData,
    RiemannData,
    RunConfig,
    SolutionField,
    TableData,
    Trajectory,
    run,
    run_local_reference,
)

H_BASE = 0.01
FINE_LEVEL = 5
EXP1_REFERENCE_H = 0.0002

INITIALS: dict[str, InitialData] = {
    "bell": BellShape(),
    "riemann": RiemannData(0.1, 0.6),
}


@dataclass(frozen=True)
class SweepEntry:
    config: RunConfig
    initial_name: str
    reference_key: str
    m_label: int


@dataclass
class ExperimentSpec:
    experiment: str
    entries: list[SweepEntry]
    references: dict[str, tuple[str, RunConfig]]  # key -> (mode, config)
    window: tuple[float, float] = (0.0, 1.0)
    snapshot_times: tuple[float, ...] = ()


def _ladder(levels, base_h=H_BASE):
    return [base_h * 2.0**-l for l in levels]


def experiment1_spec(
    *,
    delta: float = 0.005,
    h: float = 0.001,
    T: float = 1.0,
    rules=("left", "normalized-left", "exact"),
    initials=("bell", "riemann"),
    flux: str = "lf",
    kernel: str = "linear",
    lam: float = 0.25,
    alpha: float = 2.0,
    reference_h: float = EXP1_REFERENCE_H,
    snapshot_times=(0.0, 0.5, 1.0),
) -> ExperimentSpec:
    entries = []
    references = {}
    for init_name in initials:
        ref_cfg = RunConfig(
            kernel=kernel, rule="exact", flux=flux, delta=reference_h, h=reference_h,
            T=T, initial=INITIALS[init_name], lam=lam, alpha=alpha,
            snapshot_times=(T,),
        )
        references[init_name] = ("local", ref_cfg)
        for rule in rules:
            cfg = RunConfig(
                kernel=kernel, rule=rule, flux=flux, delta=delta, h=h, T=T,
                initial=INITIALS[init_name], lam=lam, alpha=alpha,
                snapshot_times=tuple(snapshot_times),
            )
            entries.append(SweepEntry(cfg, init_name, init_name, m_label=0))
    return ExperimentSpec("exp1", entries, references, snapshot_times=tuple(snapshot_times))


def experiment2_spec(
    *,
    m_values=(1, 2, 5),
    levels=(0, 1, 2, 3),
    base_h: float = H_BASE,
    rules=("left", "normalized-left", "exact"),
    initials=("bell", "riemann"),
    flux: str = "lf",
    kernel: str = "linear",
    lam: float = 0.25,
    alpha: float = 2.0,
    T: float = 1.0,
    reference_level: int = FINE_LEVEL,
    kernels=None,
) -> ExperimentSpec:
    """Vanishing-horizon sweep (delta = m h) against a fine local reference.

    With ``kernels`` set (experiment 4) the kernel varies instead of the rule.
    """
    h_fine = base_h * 2.0**-reference_level
    variants = [("kernel", k) for k in kernels] if kernels else [("rule", r) for r in rules]
    entries = []
    references = {}
    for init_name in initials:
        ref_cfg = RunConfig(
            kernel=kernel, rule="exact", flux=flux, delta=h_fine, h=h_fine, T=T,
            initial=INITIALS[init_name], lam=lam, alpha=alpha, snapshot_times=(T,),
        )
        references[init_name] = ("local", ref_cfg)
        for axis, value in variants:
            for m in m_values:
                for h in _ladder(levels, base_h):
                    cfg = RunConfig(
                        kernel=value if axis == "kernel" else kernel,
                        rule=value if axis == "rule" else "exact",
                        flux=flux, delta=m * h, h=h, T=T,
                        initial=INITIALS[init_name], lam=lam, alpha=alpha,
                        snapshot_times=(T,),
                    )
                    entries.append(SweepEntry(cfg, init_name, init_name, m_label=m))
    name = "exp4" if kernels else "exp2"
    return ExperimentSpec(name, entries, references)


def experiment3_spec(
    *,
    deltas=(0.01, 0.005, 0.0025),
    levels=(0, 1, 2, 3),
    base_h: float = H_BASE,
    rules=("left", "normalized-left", "exact"),
    initials=("bell", "riemann"),
    flux: str = "lf",
    kernel: str = "linear",
    lam: float = 0.25,
    alpha: float = 2.0,
    T: float = 1.0,
    reference_level: int = FINE_LEVEL,
) -> ExperimentSpec:
    h_fine = base_h * 2.0**-reference_level
    entries = []
    references = {}
    for init_name in initials:
        for rule in rules:
            for delta in deltas:
                key = f"{init_name}:{rule}:{delta!r}"
                ref_cfg = RunConfig(
                    kernel=kernel, rule=rule, flux=flux, delta=delta, h=h_fine, T=T,
                    initial=INITIALS[init_name], lam=lam, alpha=alpha,
                    snapshot_times=(T,),
                )
                references[key] = ("nonlocal", ref_cfg)
                for h in _ladder(levels, base_h):
                    cfg = RunConfig(
                        kernel=kernel, rule=rule, flux=flux, delta=delta, h=h, T=T,
                        initial=INITIALS[init_name], lam=lam, alpha=alpha,
                        snapshot_times=(T,),
                    )
                    entries.append(SweepEntry(cfg, init_name, key, m_label=0))
    return ExperimentSpec("exp3", entries, references)


def experiment4_spec(**kwargs) -> ExperimentSpec:
    kwargs.setdefault("kernels", ("linear", "exponential", "constant"))
    return experiment2_spec(**kwargs)


SPEC_BUILDERS = {
    "1": experiment1_spec,
    "2": experiment2_spec,
    "3": experiment3_spec,
    "4": experiment4_spec,
}


# ---------------------------------------------------------------------------
# Serialization helpers


def initial_to_dict(data: InitialData) -> dict:
    if isinstance(data, BellShape):
        return {"kind": "bell", "base": data.base, "amplitude": data.amplitude,
                "sharpness": data.sharpness, "center": data.center}
    if isinstance(data, RiemannData):
        return {"kind": "riemann", "rho_left": data.rho_left,
                "rho_right": data.rho_right, "jump": data.jump}
    return {"kind": "table", "x": list(data.xs), "rho": list(data.values)}


def config_to_dict(config: RunConfig) -> dict:
    return {
        "kernel": config.kernel,
        "rule": config.rule,
        "flux": config.flux,
        "delta": config.delta,
        "h": config.h,
        "lambda": config.lam,
        "alpha": config.alpha,
        "T": config.T,
        "initial": initial_to_dict(config.initial),
        "report_window": list(config.report_window),
        "snapshot_times": list(config.snapshot_times),
    }


def config_hash(config: RunConfig) -> str:
    payload = json.dumps(config_to_dict(config), sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:12]


def window_slice(field: SolutionField, window: tuple[float, float]) -> tuple[np.ndarray, np.ndarray]:
    """Cell centers/values whose centers lie inside the window."""
    x = field.x()
    lo, hi = window
    mask = (x >= lo - 1e-12) & (x <= hi + 1e-12)
    return x[mask], field.values[mask]


def _format_time(t: float) -> str:
    return f"{t:g}"


def write_snapshot_csv(path: Path, field: SolutionField, window: tuple[float, float]) -> int:
    x, rho = window_slice(field, window)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "rho"])
        for xi, ri in zip(x, rho):
            writer.writerow([repr(float(xi)), repr(float(ri))])
    return len(x)


def write_run_outputs(
    run_dir: Path,
    trajectory: Trajectory,
    window: tuple[float, float],
    extra_meta: dict | None = None,
) -> None:
    run_dir.mkdir(parents=True, exist_ok=True)
    seen = set()
    for snap in trajectory.snapshots:
        name = f"snapshot_t{_format_time(snap.t_requested)}.csv"
        if name in seen:
            continue
        seen.add(name)
        write_snapshot_csv(run_dir / name, snap.field, window)

    meta = {
        "config": config_to_dict(trajectory.config),
        "mode": trajectory.mode,
        "tau": trajectory.grid.tau,
        "m": trajectory.weights.m if trajectory.weights is not None else 1,
        "weight_sum": trajectory.weights.weight_sum if trajectory.weights is not None else 1.0,
        "n_steps": trajectory.n_steps,
        "actual_time": trajectory.actual_time,
        "snapshot_actual_times": [s.t_actual for s in trajectory.snapshots],
        "assumption5_margin": trajectory.assumption5_margin,
        "delta0": trajectory.delta0_estimate,
        "warnings": list(trajectory.warnings),
    }
    if extra_meta:
        meta.update(extra_meta)
    (run_dir / "meta.json").write_text(json.dumps(meta, sort_keys=True, indent=2))
    (run_dir / "diagnostics.json").write_text(
        json.dumps(run_summary(trajectory), sort_keys=True, indent=2)
    )


def _execute_entry(entry: SweepEntry) -> Trajectory:
    return run(entry.config)


def _execute_reference(job: tuple[str, RunConfig]) -> Trajectory:
    mode, config = job
    return run_local_reference(config) if mode == "local" else run(config)


def run_experiment(spec: ExperimentSpec, out_dir: Path | str, jobs: int = 1) -> dict:
    """Execute references then sweep entries; write CSVs, sidecars, errors."""
    root = Path(out_dir) / spec.experiment
    root.mkdir(parents=True, exist_ok=True)

    if jobs > 1 and len(spec.references) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            ref_results = list(pool.map(_execute_reference, spec.references.values()))
        references = dict(zip(spec.references.keys(), ref_results))
    else:
        references = {k: _execute_reference(v) for k, v in spec.references.items()}

    for key, traj in references.items():
        ref_dir = root / "reference" / key.replace(":", "_")
        write_run_outputs(ref_dir, traj, spec.window)

    if jobs > 1 and len(spec.entries) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_execute_entry, spec.entries, chunksize=1))
        outcomes = list(zip(spec.entries, results))
    else:
        outcomes = [(e, _execute_entry(e)) for e in spec.entries]

    rows = []
    failures = []
    for entry, traj in outcomes:
        cfg = entry.config
        run_dir = root / config_hash(cfg)
        try:
            reference = references[entry.reference_key]
            error = l1_error(traj.final, reference.final, window=spec.window)
            write_run_outputs(run_dir, traj, spec.window)
            final_ref = reference.snapshots[-1] if reference.snapshots else None
            if final_ref is not None:
                name = f"reference_t{_format_time(final_ref.t_requested)}.csv"
                write_snapshot_csv(run_dir / name, final_ref.field, spec.window)
            rows.append(
                {
                    "h": cfg.h,
                    "delta": cfg.delta,
                    "m": entry.m_label or (traj.weights.m if traj.weights else 1),
                    "rule": cfg.rule,
                    "flux": cfg.flux,
                    "kernel": cfg.kernel,
                    "initial": entry.initial_name,
                    "error": error,
                }
            )
        except Exception as exc:  # keep partial results, report at the end
            failures.append({"run": config_hash(cfg), "error": str(exc)})

    errors_path = root / "errors.csv"
    with errors_path.open("w", newline="") as fh:
        writer = csv.DictWriter(
            fh, fieldnames=["h", "delta", "m", "rule", "flux", "kernel", "initial", "error"]
        )
        writer.writeheader()
        for row in rows:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})

    summary = {
        "experiment": spec.experiment,
        "n_runs": len(spec.entries),
        "n_references": len(spec.references),
        "n_errors_rows": len(rows),
        "failures": failures,
        "out": str(root),
    }
    (root / "summary.json").write_text(json.dumps(summary, sort_keys=True, indent=2))
    return summary


# ---------------------------------------------------------------------------
# Override parsing (CLI --config for experiments)

_EXPERIMENT_OVERRIDES = {
    "1": {"delta", "h", "T", "rules", "initials", "flux", "kernel", "lam", "alpha",
          "reference_h", "snapshot_times"},
    "2": {"m_values", "levels", "base_h", "rules", "initials", "flux", "kernel",
          "lam", "alpha", "T", "reference_level"},
    "3": {"deltas", "levels", "base_h", "rules", "initials", "flux", "kernel",
          "lam", "alpha", "T", "reference_level"},
    "4": {"m_values", "levels", "base_h", "kernels", "initials", "flux", "kernel",
          "lam", "alpha", "T", "reference_level"},
}


def build_experiment_spec(experiment: str, overrides: dict | None = None) -> ExperimentSpec:
    if experiment not in SPEC_BUILDERS:
        raise ConfigError(f"unknown experiment {experiment!r}; expected 1, 2, 3, or 4")
    overrides = dict(overrides or {})
    allowed = _EXPERIMENT_OVERRIDES[experiment]
    unknown = set(overrides) - allowed
    if unknown:
        raise ConfigError(
            f"unknown experiment override(s) {sorted(unknown)}; allowed: {sorted(allowed)}"
        )
    for key in ("rules", "initials", "kernels", "m_values", "levels", "deltas", "snapshot_times"):
        if key in overrides:
            overrides[key] = tuple(overrides[key])
    return SPEC_BUILDERS[experiment](**overrides)
