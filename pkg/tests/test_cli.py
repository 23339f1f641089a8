import csv
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from posbuild.cli import main
from posbuild.scenario import ConfigError, ScenarioConfig, load_config, run_scenario, sweep_cells


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return p


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


EQ = {"mode": "equilibrium", "kappa": 1, "lambda": 5, "n_terms": 20, "gamma": 0.8, "output": "eq"}


def test_equilibrium_mode_writes_all_artifacts(tmp_path):
    cfg = write(tmp_path, "eq.json", EQ)
    assert main(["solve", str(cfg), "--quiet"]) == 0
    out = tmp_path / "eq"
    for name in ("strategies.csv", "state_space.csv", "report.json", "coefficients.json"):
        assert (out / name).exists()
    report = json.loads((out / "report.json").read_text())
    assert report["status"] == "converged" and report["iterations"] <= 20
    assert report["final_costs"][0] == pytest.approx(8.2, rel=0.05)
    assert report["final_costs"][1] == pytest.approx(46.2, rel=0.05)
    rows = read_csv(out / "strategies.csv")
    assert list(rows[0]) == ["t", "a", "b", "a_closed_form", "b_closed_form"]
    assert (rows[0]["t"], rows[0]["a"], rows[0]["b"]) == ("0", "0", "0")
    assert (rows[-1]["t"], rows[-1]["a"], rows[-1]["b"]) == ("1", "1", "1")
    assert len(rows) == 201
    states = read_csv(out / "state_space.csv")
    assert states[0]["phase"] == "init" and float(states[0]["cost_a"]) == 9.0
    coeffs = json.loads((out / "coefficients.json").read_text())
    assert len(coeffs["a"]) == 20 and coeffs["lambda"] == 5.0 and coeffs["gamma"] == 0.8


def test_best_response_no_sell_is_monotone(tmp_path):
    cfg = write(tmp_path, "br.json", {
        "mode": "best_response", "kappa": 0.5, "lambda": 1, "n_terms": 20,
        "adversary": {"kind": "eager", "sigma": 3}, "constraints_a": [{"kind": "no_sell"}], "output": "br",
    })
    assert run_scenario(cfg) == 0
    a = np.array([float(r["a"]) for r in read_csv(tmp_path / "br" / "strategies.csv")])
    assert np.all(np.diff(a) >= -1e-6)


def test_best_response_unconstrained_reports_closed_form(tmp_path):
    cfg = write(tmp_path, "br.json", {
        "mode": "best_response", "kappa": 0.5, "lambda": 1, "n_terms": 40, "sigma": 3,
        "adversary": {"kind": "risk_averse"}, "output": "br",
    })
    assert run_scenario(cfg) == 0
    report = json.loads((tmp_path / "br" / "report.json").read_text())
    assert report["l2_a_closed_form"] < 1e-3
    assert "a_closed_form" in read_csv(tmp_path / "br" / "strategies.csv")[0]


def test_closed_form_mode_is_symmetric_at_unit_lambda(tmp_path):
    cfg = write(tmp_path, "cf.json", {"mode": "closed_form", "kappa": 25, "lambda": 1, "n_terms": 20, "output": "cf"})
    assert run_scenario(cfg) == 0
    rows = read_csv(tmp_path / "cf" / "strategies.csv")
    assert all(r["a"] == r["b"] for r in rows)


def test_coefficient_file_adversary(tmp_path):
    (tmp_path / "coef.json").write_text(json.dumps({"coefficients": [0.1, 0.0, 0.02]}))
    cfg = write(tmp_path, "br.json", {
        "mode": "best_response", "kappa": 1, "lambda": 2, "n_terms": 5,
        "adversary": {"kind": "file", "path": "coef.json"}, "output": "out",
    })
    assert run_scenario(cfg) == 0
    coeffs = json.loads((tmp_path / "out" / "coefficients.json").read_text())
    assert coeffs["b"] == [0.1, 0.0, 0.02, 0.0, 0.0]


def test_divergent_run_exits_3_with_artifacts(tmp_path):
    cfg = write(tmp_path, "div.json", {"mode": "equilibrium", "kappa": 25, "lambda": 1, "n_terms": 35,
                                       "gamma": 1.0, "output": "div"})
    assert run_scenario(cfg) == 3
    report = json.loads((tmp_path / "div" / "report.json").read_text())
    assert report["status"] == "diverged"
    assert len(read_csv(tmp_path / "div" / "state_space.csv")) == 1 + 2 * report["iterations"]


def test_solver_failure_exits_3(tmp_path):
    cfg = write(tmp_path, "bad.json", {
        "mode": "equilibrium", "kappa": 1, "lambda": 1, "n_terms": 6, "output": "f",
        "constraints_a": [{"kind": "path_upper", "bound": 0.2, "grid_points": 1},
                          {"kind": "path_lower", "bound": 0.8, "grid_points": 1}],
    })
    assert run_scenario(cfg) == 3
    report = json.loads((tmp_path / "f" / "report.json").read_text())
    assert report["status"] == "solver_failure" and "k=1(i)" in report["error"]


@pytest.mark.parametrize(
    "patch,key",
    [
        ({"kappa": -1}, "kappa"),
        ({"lambda": 0}, "lambda"),
        ({"gamma": 2}, "gamma"),
        ({"n_terms": 2.5}, "n_terms"),
        ({"mode": "nope"}, "mode"),
        ({"colour": 1}, "colour"),
        ({"constraints_a": [{"kind": "overbuy"}]}, "constraints_a[0]"),
        ({"constraints_a": [{"kind": "no_sell", "rho": 1}]}, "constraints_a[0].rho"),
        ({"constraints_b": [{"kind": "teleport"}]}, "constraints_b[0].kind"),
        ({"mode": "best_response"}, "adversary"),
        ({"mode": "best_response", "adversary": {"kind": "eager"}}, "adversary.sigma"),
    ],
)
def test_config_errors_name_the_key(tmp_path, patch, key):
    raw = {**EQ, **patch}
    with pytest.raises(ConfigError) as info:
        ScenarioConfig.from_dict(raw, tmp_path)
    assert info.value.key == key
    cfg = write(tmp_path, "c.json", raw)
    assert run_scenario(cfg) == 2


def test_missing_and_malformed_files(tmp_path):
    assert run_scenario(tmp_path / "missing.json") == 2
    (tmp_path / "broken.json").write_text("{not json")
    assert run_scenario(tmp_path / "broken.json") == 2


def test_seedless_flag_is_rejected(tmp_path):
    cfg = write(tmp_path, "eq.json", EQ)
    assert main(["solve", str(cfg), "--seedless", "--quiet"]) == 2


def test_out_flag_overrides_output(tmp_path):
    cfg = write(tmp_path, "eq.json", EQ)
    assert main(["solve", str(cfg), "--out", str(tmp_path / "elsewhere"), "--quiet"]) == 0
    assert (tmp_path / "elsewhere" / "report.json").exists()
    assert load_config(cfg, output="x").output == Path("x")


def test_command_mode_mismatch(tmp_path):
    assert main(["sweep", str(write(tmp_path, "eq.json", EQ)), "--quiet"]) == 2
    sweep = write(tmp_path, "s.json", {**EQ, "mode": "sweep", "grid": {"gamma": [0.5]}})
    assert main(["solve", str(sweep), "--quiet"]) == 2


def test_gamma_sweep_iterations_non_increasing(tmp_path):
    cfg = write(tmp_path, "sw.json", {"mode": "sweep", "kappa": 5, "lambda": 1, "n_terms": 20,
                                       "grid": {"gamma": [0.2, 0.4, 0.6, 0.8, 1.0]}, "output": "sw"})
    assert main(["sweep", str(cfg), "--quiet"]) == 0
    rows = read_csv(tmp_path / "sw" / "summary.csv")
    assert [r["status"] for r in rows] == ["converged"] * 5
    its = [int(r["iterations"]) for r in rows]
    assert all(b <= a for a, b in zip(its, its[1:]))
    assert all((tmp_path / "sw" / r["cell"] / "report.json").exists() for r in rows)


def test_n_sweep_error_ratio(tmp_path):
    cfg = write(tmp_path, "sw.json", {"mode": "sweep", "kappa": 20, "lambda": 1, "gamma": 0.5,
                                       "max_iterations": 200, "grid": {"n_terms": [10, 30]}, "output": "sw"})
    assert run_scenario(cfg) == 0
    rows = read_csv(tmp_path / "sw" / "summary.csv")
    ratio = float(rows[0]["l2_a"]) / float(rows[1]["l2_a"])
    assert 5 < ratio < 25


def test_empty_sweep_writes_header_only(tmp_path):
    for grid in ({}, {"gamma": []}):
        cfg = write(tmp_path, "sw.json", {"mode": "sweep", "kappa": 1, "lambda": 1, "grid": grid, "output": "e"})
        assert run_scenario(cfg) == 0
        lines = (tmp_path / "e" / "summary.csv").read_text().splitlines()
        assert len(lines) == 1 and lines[0].startswith("cell,kappa")


def test_sweep_continues_past_failing_cells(tmp_path):
    cfg = write(tmp_path, "sw.json", {"mode": "sweep", "kappa": 25, "lambda": 1, "n_terms": 35,
                                       "grid": {"gamma": [1.0, 0.2], "lambda": [1, -1]}, "output": "sw"})
    assert run_scenario(cfg) == 0
    rows = read_csv(tmp_path / "sw" / "summary.csv")
    statuses = [r["status"] for r in rows]
    # cells iterate lambda (outer) then gamma, in the fixed key order
    assert statuses == ["diverged", "converged", "config_error", "config_error"]


def test_sweep_cells_order():
    cfg = ScenarioConfig.from_dict({"mode": "sweep", "kappa": 1, "lambda": 1,
                                    "grid": {"gamma": [0.1, 0.2], "kappa": [1, 2]}})
    assert sweep_cells(cfg) == [{"kappa": 1, "gamma": 0.1}, {"kappa": 1, "gamma": 0.2},
                                {"kappa": 2, "gamma": 0.1}, {"kappa": 2, "gamma": 0.2}]


def test_parallel_sweep_matches_serial(tmp_path):
    raw = {"mode": "sweep", "kappa": 5, "lambda": 1, "n_terms": 12, "grid": {"gamma": [0.4, 0.8, 1.0]}}
    cfg = write(tmp_path, "sw.json", raw)
    assert main(["sweep", str(cfg), "--out", str(tmp_path / "serial"), "--quiet"]) == 0
    assert main(["sweep", str(cfg), "--out", str(tmp_path / "par"), "--jobs", "2", "--quiet"]) == 0
    for f in sorted((tmp_path / "serial").rglob("*")):
        if f.is_file():
            assert f.read_bytes() == (tmp_path / "par" / f.relative_to(tmp_path / "serial")).read_bytes()


def test_module_entry_point(tmp_path):
    cfg = write(tmp_path, "cf.json", {"mode": "closed_form", "kappa": 1, "lambda": 2, "output": "cf"})
    proc = subprocess.run([sys.executable, "-m", "posbuild", "solve", str(cfg)], capture_output=True, text=True)
    assert proc.returncode == 0 and "closed_form" in proc.stdout
