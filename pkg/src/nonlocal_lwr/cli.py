"""Command-line driver: single runs, canned experiments, admissibility checks.

Exit codes: 0 on success, 2 for configuration problems, 3 for numerical
failures.  Reruns with identical inputs are bitwise reproducible: nothing in
the pipeline draws randomness.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from .diagnostics import Delta0Inputs, delta0
from .errors import ConfigError, DomainError, NumericsError
from .experiments import (
    build_experiment_spec,
    config_hash,
    config_to_dict,
    run_experiment,
    write_run_outputs,
)
from .fluxes import check_assumption4, check_assumption5, flux_from_name
from .kernels import kernel_from_name
from .quadrature import build_weights, check_assumption3, theoretical_gap_constant
from .solver import (
    BellShape,
    InitialData,
    RiemannData,
    RunConfig,
    TableData,
    one_sided_lipschitz,
    run,
)

_RUN_CONFIG_KEYS = {
    "kernel", "rule", "flux", "delta", "h", "lambda", "alpha", "T",
    "initial", "report_window", "snapshot_times",
}
_INITIAL_KEYS = {
    "bell": {"kind", "base", "amplitude", "sharpness", "center"},
    "riemann": {"kind", "rho_left", "rho_right", "jump"},
    "table": {"kind", "x", "rho"},
}


def _require_number(d: dict, key: str, default=None):
    value = d.get(key, default)
    if value is None:
        raise ConfigError(f"missing required config field {key!r}")
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(f"config field {key!r} must be a number, got {value!r}")
    return float(value)


def parse_initial(d) -> InitialData:
    if not isinstance(d, dict):
        raise ConfigError("config field 'initial' must be an object with a 'kind'")
    kind = d.get("kind")
    if kind not in _INITIAL_KEYS:
        raise ConfigError(f"unknown initial kind {kind!r}; expected bell, riemann, or table")
    unknown = set(d) - _INITIAL_KEYS[kind]
    if unknown:
        raise ConfigError(f"unknown field(s) {sorted(unknown)} in initial data")
    if kind == "bell":
        return BellShape(
            base=_require_number(d, "base", 0.4),
            amplitude=_require_number(d, "amplitude", 0.4),
            sharpness=_require_number(d, "sharpness", 100.0),
            center=_require_number(d, "center", 0.5),
        )
    if kind == "riemann":
        return RiemannData(
            rho_left=_require_number(d, "rho_left"),
            rho_right=_require_number(d, "rho_right"),
            jump=_require_number(d, "jump", 0.5),
        )
    xs = d.get("x")
    rho = d.get("rho")
    if not isinstance(xs, list) or not isinstance(rho, list):
        raise ConfigError("table initial data needs list fields 'x' and 'rho'")
    try:
        return TableData(xs=tuple(map(float, xs)), values=tuple(map(float, rho)))
    except DomainError as exc:
        raise ConfigError(str(exc)) from None


def parse_run_config(d: dict) -> RunConfig:
    if not isinstance(d, dict):
        raise ConfigError("run config must be a JSON object")
    unknown = set(d) - _RUN_CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config field(s): {sorted(unknown)}")
    window = d.get("report_window", [0.0, 1.0])
    if not (isinstance(window, list) and len(window) == 2):
        raise ConfigError("report_window must be a [lo, hi] pair")
    times = d.get("snapshot_times", [])
    if not isinstance(times, list):
        raise ConfigError("snapshot_times must be a list of times")
    return RunConfig(
        kernel=str(d.get("kernel", "linear")),
        rule=str(d.get("rule", "exact")),
        flux=str(d.get("flux", "lf")),
        delta=_require_number(d, "delta"),
        h=_require_number(d, "h"),
        T=_require_number(d, "T"),
        initial=parse_initial(d.get("initial")),
        lam=_require_number(d, "lambda", 0.25),
        alpha=_require_number(d, "alpha", 2.0),
        report_window=(float(window[0]), float(window[1])),
        snapshot_times=tuple(float(t) for t in times),
    )


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from None


def _parse_times(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise ConfigError(f"bad snapshot time list {text!r}") from None


def cmd_single(args) -> int:
    config = parse_run_config(_load_json(args.config))
    if args.snapshot_times is not None:
        config = RunConfig(**{**asdict_shallow(config), "snapshot_times": _parse_times(args.snapshot_times)})
    try:
        trajectory = run(config)
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    run_dir = Path(args.out) / "single" / config_hash(config)
    write_run_outputs(run_dir, trajectory, config.report_window)
    for w in trajectory.warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(run_dir)
    return 0


def asdict_shallow(config: RunConfig) -> dict:
    return {
        "kernel": config.kernel, "rule": config.rule, "flux": config.flux,
        "delta": config.delta, "h": config.h, "T": config.T,
        "initial": config.initial, "lam": config.lam, "alpha": config.alpha,
        "report_window": config.report_window, "snapshot_times": config.snapshot_times,
    }


def cmd_experiment(args) -> int:
    overrides = _load_json(args.config) if args.config else None
    spec = build_experiment_spec(args.id, overrides)
    summary = run_experiment(spec, Path(args.out), jobs=args.jobs)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0 if not summary["failures"] else 3


def cmd_check(args) -> int:
    kernel = kernel_from_name(args.kernel)
    flux = flux_from_name(args.flux, args.alpha)
    h = 1.0 / args.m
    weights = build_weights(kernel, 1.0, h, args.rule)
    a3 = check_assumption3(weights, kernel, 1.0, h)
    a4 = check_assumption4(flux)
    ok5, margin = check_assumption5(flux, args.lam)

    lip = args.lip if args.lip is not None else one_sided_lipschitz(BellShape())
    c = theoretical_gap_constant(kernel, args.rule)
    try:
        threshold = delta0(Delta0Inputs(c=c, rho_min=args.rho_min, lip_const=lip, w0=kernel.value_at_zero))
    except DomainError:
        threshold = None
    report = {
        "weights": {
            "rule": args.rule,
            "m": weights.m,
            "weight_sum": weights.weight_sum,
            "sandwich_ok": a3.sandwich_ok,
            "gap_constant": a3.gap_constant,
            "normalized": a3.normalized,
            "c_theoretical": a3.c_theoretical,
        },
        "flux": {
            "kind": args.flux,
            "alpha": args.alpha,
            "clauses": {c.name: c.passed for c in a4.clauses},
            "witnesses": {c.name: list(c.witness) for c in a4.clauses if c.witness},
            "ok": a4.ok,
        },
        "cfl": {"lambda": args.lam, "ok": ok5, "margin": margin},
        "delta0": {"rho_min": args.rho_min, "lipschitz": lip, "c": c, "value": threshold},
    }
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nllwr",
        description="Finite volume runs for LWR traffic flow with look-ahead velocity",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_single = sub.add_parser("single", help="one run from a JSON config")
    p_single.add_argument("--config", required=True, help="path to a run config JSON")
    p_single.add_argument("--out", default="out", help="output directory root")
    p_single.add_argument("--snapshot-times", default=None, help="comma list overriding config times")
    p_single.set_defaults(func=cmd_single)

    p_exp = sub.add_parser("experiment", help="run a canned experiment sweep")
    p_exp.add_argument("id", choices=["1", "2", "3", "4"], help="experiment number")
    p_exp.add_argument("--out", default="out", help="output directory root")
    p_exp.add_argument("--jobs", type=int, default=1, help="parallel worker count")
    p_exp.add_argument("--config", default=None, help="JSON file overriding sweep parameters")
    p_exp.set_defaults(func=cmd_experiment)

    p_check = sub.add_parser("check", help="report weight/flux/CFL admissibility")
    p_check.add_argument("--flux", choices=["lf", "godunov", "mlf"], required=True)
    p_check.add_argument("--rule", choices=["left", "normalized-left", "exact"], required=True)
    p_check.add_argument("--kernel", choices=["linear", "exponential", "constant"], required=True)
    p_check.add_argument("--lam", type=float, default=0.25)
    p_check.add_argument("--alpha", type=float, default=2.0)
    p_check.add_argument("--m", type=int, default=8)
    p_check.add_argument("--rho-min", type=float, default=0.4)
    p_check.add_argument("--lip", type=float, default=None,
                         help="one-sided Lipschitz constant (default: measured bell profile)")
    p_check.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericsError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
