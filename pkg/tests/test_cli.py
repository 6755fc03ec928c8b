import json
import subprocess
import sys

import numpy as np
import pytest

from hetnetsim.cli import (ExperimentSpec, _axis, config_from_dict, load_reproduce_spec,
                           main, parse_technique, reproduce_names, run)
from hetnetsim.model import Access, ConfigError

DEMO = {
    "path_loss_exponent": 3.8,
    "tiers": [
        {"power": 1.0, "density": 1.0, "target_sir_db": 0.0, "antennas": 2,
         "users_served": 2},
        {"power": 0.01, "density": 2.0, "target_sir_db": 0.0, "antennas": 2,
         "users_served": 2, "access": "closed"},
    ],
}


@pytest.fixture
def demo_config(tmp_path):
    path = tmp_path / "demo.json"
    path.write_text(json.dumps(DEMO))
    return path


def run_cli(*args):
    return main([str(a) for a in args])


# ---------------------------------------------------------------- parsing

def test_config_from_dict():
    cfg, placement = config_from_dict(DEMO)
    assert len(cfg.tiers) == 2
    assert cfg.tiers[0].target_sir == pytest.approx(1.0)
    assert cfg.tiers[1].access == Access.CLOSED
    assert all(p.value == "ppp" for p in placement)


def test_config_requires_tiers_and_target():
    with pytest.raises(ConfigError, match="tiers"):
        config_from_dict({"path_loss_exponent": 4.0})
    with pytest.raises(ConfigError, match="target_sir"):
        config_from_dict({"tiers": [{"power": 1.0, "density": 1.0}]})


def test_parse_technique():
    tech, m = parse_technique("siso")
    assert tech.tag == "siso" and m == 1
    tech, m = parse_technique("su_bf:4")
    assert tech.tag == "su_bf" and m == 4
    tech, m = parse_technique("sdma:4")
    assert (tech.tag, tech.users, m) == ("sdma", 4, 4)
    tech, m = parse_technique("sdma:4:2")
    assert (tech.users, m) == (2, 4)
    with pytest.raises(ConfigError):
        parse_technique("mimo:2")


def test_axis():
    np.testing.assert_allclose(_axis((0.0, 1.0, 0.25)), [0, 0.25, 0.5, 0.75, 1.0])
    np.testing.assert_allclose(_axis((-4.0, -4.0, 1.0)), [-4.0])
    with pytest.raises(ConfigError):
        _axis((0.0, 1.0, 0.0))


# ---------------------------------------------------------------- subcommands

def test_coverage_sweep_writes_csv(tmp_path, demo_config, capsys):
    out = tmp_path / "cov.csv"
    rc = run_cli("coverage-sweep", "--config", demo_config, "--sweep-db", 0, 4, 2,
                 "--realizations", 60, "--seed", 3, "--out", out)
    assert rc == 0
    text = out.read_text()
    assert "# kind=coverage_sweep" in text
    assert "# config_digest=" in text
    data_lines = [l for l in text.splitlines() if not l.startswith("#")]
    assert data_lines[0].startswith("beta_db,curve,coverage")
    assert len(data_lines) == 1 + 3  # header + three sweep points


def test_bound_vs_mc_has_bound_column(tmp_path, demo_config):
    out = tmp_path / "bvm.csv"
    rc = run_cli("bound-vs-mc", "--config", demo_config, "--sweep-db", 0, 0, 1,
                 "--realizations", 40, "--out", out)
    assert rc == 0
    lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    header = lines[0].split(",")
    row = lines[1].split(",")
    bound = float(row[header.index("bound")])
    assert 0.0 < bound < 1.0


def test_candidate_count_output(tmp_path, demo_config):
    out = tmp_path / "cc.csv"
    rc = run_cli("candidate-count", "--config", demo_config, "--sweep-db", 0, 0, 1,
                 "--realizations", 50, "--out", out)
    assert rc == 0
    lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    header = lines[0].split(",")
    row = dict(zip(header, lines[1].split(",")))
    total = float(row["p_zero"]) + float(row["p_one"]) + float(row["p_multi"])
    assert total == pytest.approx(1.0, abs=1e-9)


def test_ase_compare_analytic_column(tmp_path):
    open_demo = {"path_loss_exponent": 3.8, "tiers": [
        dict(DEMO["tiers"][0]), {**DEMO["tiers"][1], "access": "open"}]}
    cfg_path = tmp_path / "open.json"
    cfg_path.write_text(json.dumps(open_demo))
    out = tmp_path / "ase.csv"
    rc = run_cli("ase-compare", "--config", cfg_path, "--sweep-db", 3, 3, 1,
                 "--realizations", 2000, "--seed", 8, "--out", out)
    assert rc == 0
    lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    row = dict(zip(lines[0].split(","), lines[1].split(",")))
    # symmetric full SDMA M=2: the closed form applies and the Monte-Carlo
    # estimate should sit near it
    assert float(row["ase_analytic"]) == pytest.approx(float(row["ase_mc"]), rel=0.15)


def test_theta_sweep_runs(tmp_path, demo_config):
    out = tmp_path / "theta.csv"
    rc = run_cli("theta-sweep", "--config", demo_config, "--theta", 0, 1, 0.5,
                 "--tier", 1, "--realizations", 40, "--out", out)
    assert rc == 0
    lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    assert len(lines) == 1 + 3


def test_ordering_ccdf_mode(tmp_path):
    out = tmp_path / "ccdf.csv"
    rc = run_cli("ordering", "--ccdf", "4,2", "--ccdf", "100,100", "--out", out)
    assert rc == 0
    text = out.read_text()
    assert "verdict_Z_4_2_vs_Z_100_100=crossing" in text


def test_ordering_compare_mode(tmp_path, demo_config):
    out = tmp_path / "ord.csv"
    rc = run_cli("ordering", "--config", demo_config, "--technique-a", "su_bf:4",
                 "--technique-b", "sdma:4", "--sweep-db", 0, 4, 2,
                 "--realizations", 50, "--out", out)
    assert rc == 0
    text = out.read_text()
    assert "# predicted_better=a" in text
    assert "# bs_sir_violations=0" in text


def test_ordering_needs_mode(demo_config):
    assert run_cli("ordering", "--config", demo_config) == 1


# ---------------------------------------------------------------- exit codes

def test_invalid_config_is_validation_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    rc = run_cli("coverage-sweep", "--config", bad, "--sweep-db", 0, 1, 1)
    assert rc == 1


def test_invalid_tier_spec_is_validation_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"path_loss_exponent": 3.8, "tiers": [
        {"power": 1.0, "density": 1.0, "target_sir_db": 0, "antennas": 2,
         "users_served": 3}]}))
    rc = run_cli("coverage-sweep", "--config", bad, "--sweep-db", 0, 1, 1)
    assert rc == 1


def test_empty_sweep_is_validation_error(tmp_path, demo_config):
    out = tmp_path / "never.csv"
    rc = run_cli("coverage-sweep", "--config", demo_config, "--sweep-db", 5, 0, 1,
                 "--out", out)
    assert rc == 1
    assert not out.exists()


# ---------------------------------------------------------------- verify

def test_verify_roundtrip(tmp_path, demo_config):
    out = tmp_path / "cov.csv"
    assert run_cli("coverage-sweep", "--config", demo_config, "--sweep-db", 0, 0, 1,
                   "--realizations", 30, "--out", out) == 0
    assert run_cli("verify", "--config", demo_config, out) == 0
    other = tmp_path / "other.json"
    changed = dict(DEMO)
    changed["path_loss_exponent"] = 4.0
    other.write_text(json.dumps(changed))
    assert run_cli("verify", "--config", other, out) == 1


# ---------------------------------------------------------------- reproduce

def test_reproduce_specs_enumerate_and_load():
    names = reproduce_names()
    assert {"ratio_ccdfs", "sdma_bound", "coverage_combos",
            "closed_tier_combos", "open_fraction", "ase_comparison"} <= set(names)
    for name in names:
        spec = load_reproduce_spec(name, {})
        assert spec.kind in ("coverage_sweep", "bound_vs_mc", "ordering",
                             "ase_compare", "theta_sweep", "candidate_count")


def test_reproduce_unknown_name():
    with pytest.raises(ConfigError, match="no reproduce spec"):
        load_reproduce_spec("nonexistent", {})


def test_reproduce_ratio_ccdfs_runs(tmp_path):
    out = tmp_path / "ccdfs.csv"
    rc = run_cli("reproduce", "ratio_ccdfs", "--out", out)
    assert rc == 0
    text = out.read_text()
    assert "verdict_Z_4_2_vs_Z_2_2=dominates" in text
    assert "verdict_Z_4_2_vs_Z_100_100=crossing" in text


def test_run_rejects_unknown_kind(tmp_path):
    with pytest.raises(ConfigError, match="unknown experiment kind"):
        run(ExperimentSpec(kind="nope", out=str(tmp_path / "x.csv")))


# ---------------------------------------------------------------- determinism

def test_worker_count_does_not_change_bytes(tmp_path, demo_config):
    out1 = tmp_path / "w1.csv"
    out2 = tmp_path / "w2.csv"
    base = ["coverage-sweep", "--config", str(demo_config), "--sweep-db", "0", "2", "2",
            "--realizations", "80", "--seed", "9"]
    assert main(base + ["--workers", "1", "--out", str(out1)]) == 0
    assert main(base + ["--workers", "2", "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "hetnetsim", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "hetnetsim" in proc.stdout
