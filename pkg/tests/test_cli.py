import csv
import json

import pytest

from nonlocal_lwr import ConfigError, RiemannData
from nonlocal_lwr.cli import main, parse_run_config
from nonlocal_lwr.experiments import build_experiment_spec


def write_config(path, **overrides):
    config = {
        "kernel": "linear",
        "rule": "exact",
        "flux": "lf",
        "delta": 0.01,
        "h": 0.005,
        "T": 0.1,
        "lambda": 0.25,
        "alpha": 2.0,
        "initial": {"kind": "riemann", "rho_left": 0.1, "rho_right": 0.6},
        "snapshot_times": [0, 0.05, 0.1],
    }
    config.update(overrides)
    path.write_text(json.dumps(config))
    return config


def read_csv(path):
    with path.open() as fh:
        return list(csv.DictReader(fh))


# ---------------------------------------------------------------------------
# config parsing


def test_parse_run_config_roundtrip():
    cfg = parse_run_config(
        {
            "kernel": "exponential",
            "rule": "normalized-left",
            "flux": "mlf",
            "delta": 0.02,
            "h": 0.004,
            "T": 0.5,
            "initial": {"kind": "bell"},
        }
    )
    assert cfg.kernel == "exponential"
    assert cfg.lam == 0.25 and cfg.alpha == 2.0  # defaults
    assert cfg.report_window == (0.0, 1.0)


def test_parse_run_config_rejects_unknown_fields():
    with pytest.raises(ConfigError, match="frobnicate"):
        parse_run_config({"frobnicate": 1, "delta": 0.1, "h": 0.1, "T": 1,
                          "initial": {"kind": "bell"}})


def test_parse_run_config_rejects_bad_initial():
    base = {"delta": 0.1, "h": 0.1, "T": 1.0}
    with pytest.raises(ConfigError):
        parse_run_config({**base, "initial": {"kind": "square"}})
    with pytest.raises(ConfigError):
        parse_run_config({**base, "initial": {"kind": "riemann", "rho_left": 0.1}})
    with pytest.raises(ConfigError):
        parse_run_config({**base, "initial": {"kind": "bell", "rho_left": 0.1}})


def test_parse_run_config_rejects_nonnumeric():
    with pytest.raises(ConfigError, match="delta"):
        parse_run_config({"delta": "small", "h": 0.1, "T": 1.0,
                          "initial": {"kind": "bell"}})


def test_parse_table_initial():
    cfg = parse_run_config(
        {"delta": 0.1, "h": 0.1, "T": 0.0,
         "initial": {"kind": "table", "x": [0.0, 0.5, 1.0], "rho": [0.2, 0.6]}}
    )
    assert cfg.initial.xs == (0.0, 0.5, 1.0)


# ---------------------------------------------------------------------------
# single


def test_single_writes_outputs(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    write_config(cfg_path)
    assert main(["single", "--config", str(cfg_path), "--out", str(tmp_path / "o")]) == 0
    run_dir = next((tmp_path / "o" / "single").iterdir())
    rows = read_csv(run_dir / "snapshot_t0.csv")
    assert set(rows[0]) == {"x", "rho"}
    # every report-window cell appears once: h=0.005 over [0,1] inclusive
    assert len(rows) == 201
    meta = json.loads((run_dir / "meta.json").read_text())
    assert meta["config"]["delta"] == 0.01
    assert meta["m"] == 2
    assert meta["n_steps"] == 80
    assert meta["tau"] == pytest.approx(0.00125)
    diag = json.loads((run_dir / "diagnostics.json").read_text())
    assert diag["max_conservation_residual"] <= 1e-12


def test_single_is_bitwise_reproducible(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    write_config(cfg_path)
    assert main(["single", "--config", str(cfg_path), "--out", str(tmp_path / "a")]) == 0
    assert main(["single", "--config", str(cfg_path), "--out", str(tmp_path / "b")]) == 0
    a = next((tmp_path / "a" / "single").iterdir())
    b = next((tmp_path / "b" / "single").iterdir())
    assert a.name == b.name
    for name in ("snapshot_t0.csv", "snapshot_t0.05.csv", "snapshot_t0.1.csv",
                 "meta.json", "diagnostics.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_single_snapshot_times_flag(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    write_config(cfg_path)
    out = tmp_path / "o"
    assert main(["single", "--config", str(cfg_path), "--out", str(out),
                 "--snapshot-times", "0,0.1"]) == 0
    run_dir = next((out / "single").iterdir())
    names = {p.name for p in run_dir.glob("snapshot_*.csv")}
    assert names == {"snapshot_t0.csv", "snapshot_t0.1.csv"}


def test_single_bad_config_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kernel": "linear", "frobnicate": 1}')
    assert main(["single", "--config", str(bad), "--out", str(tmp_path)]) == 2
    assert "frobnicate" in capsys.readouterr().err


def test_single_missing_file_exits_2(tmp_path):
    assert main(["single", "--config", str(tmp_path / "nope.json"),
                 "--out", str(tmp_path)]) == 2


def test_single_numerical_blowup_exits_3(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    write_config(cfg_path, **{"lambda": 40.0, "T": 2.0, "snapshot_times": [0]})
    assert main(["single", "--config", str(cfg_path), "--out", str(tmp_path)]) == 3
    assert "numerical failure" in capsys.readouterr().err


def test_single_warns_on_cfl_violation(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    write_config(cfg_path, **{"lambda": 0.3, "T": 0.05})
    assert main(["single", "--config", str(cfg_path), "--out", str(tmp_path)]) == 0
    assert "CFL" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# experiment


TINY_EXP2 = {
    "m_values": [1, 2],
    "levels": [0, 1],
    "T": 0.1,
    "reference_level": 3,
    "initials": ["riemann"],
    "rules": ["exact"],
}


def test_experiment_tiny_sweep(tmp_path, capsys):
    cfg = tmp_path / "exp.json"
    cfg.write_text(json.dumps(TINY_EXP2))
    assert main(["experiment", "2", "--out", str(tmp_path / "o"),
                 "--config", str(cfg)]) == 0
    root = tmp_path / "o" / "exp2"
    rows = read_csv(root / "errors.csv")
    assert len(rows) == 4  # 2 m-values x 2 levels
    assert set(rows[0]) == {"h", "delta", "m", "rule", "flux", "kernel", "initial", "error"}
    assert all(float(r["error"]) > 0 for r in rows)
    summary = json.loads((root / "summary.json").read_text())
    assert summary["failures"] == []
    assert summary["n_errors_rows"] == 4
    assert (root / "reference" / "riemann" / "meta.json").exists()


def test_experiment_parallel_matches_serial(tmp_path):
    cfg = tmp_path / "exp.json"
    cfg.write_text(json.dumps(TINY_EXP2))
    assert main(["experiment", "2", "--out", str(tmp_path / "serial"),
                 "--config", str(cfg)]) == 0
    assert main(["experiment", "2", "--out", str(tmp_path / "par"),
                 "--config", str(cfg), "--jobs", "2"]) == 0
    serial = (tmp_path / "serial" / "exp2" / "errors.csv").read_bytes()
    par = (tmp_path / "par" / "exp2" / "errors.csv").read_bytes()
    assert serial == par


def test_experiment_unknown_override_exits_2(tmp_path, capsys):
    cfg = tmp_path / "exp.json"
    cfg.write_text(json.dumps({"mesh": [1]}))
    assert main(["experiment", "2", "--out", str(tmp_path),
                 "--config", str(cfg)]) == 2
    assert "mesh" in capsys.readouterr().err


def test_experiment1_writes_reference_overlay(tmp_path, capsys):
    cfg = tmp_path / "exp.json"
    cfg.write_text(json.dumps({
        "delta": 0.01, "h": 0.01, "T": 0.1, "rules": ["exact"],
        "initials": ["riemann"], "reference_h": 0.005,
        "snapshot_times": [0, 0.05, 0.1],
    }))
    assert main(["experiment", "1", "--out", str(tmp_path / "o"),
                 "--config", str(cfg)]) == 0
    root = tmp_path / "o" / "exp1"
    run_dirs = [p for p in root.iterdir() if p.is_dir() and p.name not in ("reference",)]
    assert len(run_dirs) == 1
    names = {p.name for p in run_dirs[0].glob("*.csv")}
    assert "reference_t0.1.csv" in names
    assert {"snapshot_t0.csv", "snapshot_t0.05.csv", "snapshot_t0.1.csv"} <= names


def test_experiment_spec_builders_cover_full_scale_defaults():
    spec2 = build_experiment_spec("2")
    assert len(spec2.entries) == 3 * 2 * 3 * 4  # rules x initials x m x levels
    assert len(spec2.references) == 2
    spec3 = build_experiment_spec("3")
    assert len(spec3.entries) == 2 * 3 * 3 * 4
    assert len(spec3.references) == 2 * 3 * 3
    spec4 = build_experiment_spec("4")
    assert len(spec4.entries) == 3 * 2 * 3 * 4  # kernels x initials x m x levels
    kernels = {e.config.kernel for e in spec4.entries}
    assert kernels == {"linear", "exponential", "constant"}
    spec1 = build_experiment_spec("1")
    assert len(spec1.entries) == 6


# ---------------------------------------------------------------------------
# check


def run_check(capsys, *extra):
    code = main(["check", "--flux", "lf", "--rule", "exact", "--kernel", "linear",
                 "--lam", "0.25", "--alpha", "2", "--m", "8", *extra])
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_check_exact_linear_passes(capsys):
    code, report = run_check(capsys)
    assert code == 0
    assert report["cfl"] == {"lambda": 0.25, "ok": True, "margin": 0.125}
    assert report["flux"]["ok"] is True
    assert report["weights"]["normalized"] is True
    assert report["weights"]["gap_constant"] == pytest.approx(2.0)
    assert report["delta0"]["value"] == pytest.approx(0.0583, abs=2e-4)


def test_check_left_rule_reports_normalization_failure(capsys):
    code = main(["check", "--flux", "lf", "--rule", "left", "--kernel", "linear"])
    report = json.loads(capsys.readouterr().out)
    assert code == 0
    assert report["weights"]["normalized"] is False
    assert report["weights"]["weight_sum"] == pytest.approx(1.125)


def test_check_constant_kernel_zero_gap(capsys):
    code = main(["check", "--flux", "godunov", "--rule", "exact", "--kernel", "constant",
                 "--m", "4"])
    report = json.loads(capsys.readouterr().out)
    assert code == 0
    assert report["weights"]["gap_constant"] == 0.0
    assert report["delta0"]["value"] is None


def test_check_unknown_flux_exits_2(capsys):
    with pytest.raises(SystemExit) as err:
        main(["check", "--flux", "roe", "--rule", "exact", "--kernel", "linear"])
    assert err.value.code == 2
