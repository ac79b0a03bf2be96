import json
import subprocess
import sys

import pytest


def run_solver_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "nonlocal_lwr.cli", *args],
        capture_output=True, text=True, check=True,
    )


@pytest.fixture(scope="session")
def solver_outputs(tmp_path_factory):
    """Real run directories and error tables produced through the solver CLI
    (reduced sweep sizes, identical file formats)."""
    root = tmp_path_factory.mktemp("solver-out")
    exp1_cfg = root / "exp1.json"
    exp1_cfg.write_text(json.dumps({
        "delta": 0.01, "h": 0.005, "T": 0.2, "rules": ["exact", "left"],
        "initials": ["riemann"], "reference_h": 0.0025,
        "snapshot_times": [0, 0.1, 0.2],
    }))
    run_solver_cli("experiment", "1", "--out", str(root), "--config", str(exp1_cfg))
    exp2_cfg = root / "exp2.json"
    exp2_cfg.write_text(json.dumps({
        "m_values": [1, 2, 5], "levels": [0, 1, 2], "T": 0.2,
        "reference_level": 4, "initials": ["riemann"], "rules": ["exact"],
    }))
    run_solver_cli("experiment", "2", "--out", str(root), "--config", str(exp2_cfg))
    return root
