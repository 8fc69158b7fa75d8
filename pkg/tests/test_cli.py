from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from tunneldecay import analysis, cli
from tunneldecay.csvio import read_manifest, read_trace_csv, write_trace_csv
from tunneldecay.model import DEFAULT_CONFIG, config_from_mapping
from tunneldecay.observables import DecayTrace
from tunneldecay.propagator import run

# Compact box, production spacing: ~1.5 s per scenario instead of minutes.
COMPACT = [
    "--set", "x_max=50",
    "--set", "n_cells=5000",
    "--set", "absorber_start=40",
    "--set", "t_end=1",
]


@pytest.fixture(scope="module")
def run_dir(tmp_path_factory) -> Path:
    out = tmp_path_factory.mktemp("cli_run")
    assert cli.main(["run", "--out", str(out), *COMPACT]) == 0
    return out


def test_run_writes_csv_summary_manifest(run_dir):
    assert (run_dir / "h10_w0.6.csv").exists()
    assert (run_dir / "summary.json").exists()
    assert (run_dir / "manifest.json").exists()
    cols = read_trace_csv(run_dir / "h10_w0.6.csv")
    assert cols["t"][0] == 0.0
    assert cols["P"][0] == pytest.approx(1.0, abs=1e-12)
    summary = json.loads((run_dir / "summary.json").read_text())
    assert summary["runs"][0]["name"] == "h10_w0.6"


def test_manifest_config_echo_reproduces_run_bit_for_bit(run_dir, tmp_path):
    manifest = read_manifest(run_dir / "manifest.json")
    (entry,) = manifest["runs"]
    cfg = config_from_mapping(entry["config"])
    again = tmp_path / "again.csv"
    write_trace_csv(again, run(cfg))
    assert again.read_bytes() == (run_dir / entry["csv"]).read_bytes()


def test_fit_matches_in_process_analysis(tmp_path, capsys):
    # synthetic long trace so the standard fit window is populated
    t = np.linspace(0.0, 4.0, 401)
    g = -0.5 - 0.4 * np.exp(-(((t - 0.6) / 0.2) ** 2))
    trace = DecayTrace(
        t=t,
        P=np.exp(-0.5 * t),
        g=g,
        j_a=np.zeros_like(t),
        norm=np.ones_like(t),
        energy=np.full(t.shape, np.pi**2 + 0j),
        cfg=DEFAULT_CONFIG,
    )
    csv_path = tmp_path / "trace.csv"
    write_trace_csv(csv_path, trace)
    assert cli.main(["fit", str(csv_path)]) == 0
    out = capsys.readouterr().out
    cols = read_trace_csv(csv_path)
    fit = analysis.fit_exponential((cols["t"], cols["P"]))
    assert f"gamma_fit={fit.value:.8g}" in out
    assert "peak: t*=0.6" in out


def test_zero_height_labels_run_nobarrier(tmp_path):
    out = tmp_path / "free"
    code = cli.main(
        ["run", "--out", str(out), *COMPACT, "--set", "barrier_height=0"]
    )
    assert code == 0
    assert (out / "nobarrier.csv").exists()


def test_missing_config_file_is_usage_error(tmp_path, capsys):
    missing = tmp_path / "nope.cfg"
    assert cli.main(["run", "--config", str(missing)]) == 2
    assert str(missing) in capsys.readouterr().err


def test_unknown_key_is_usage_error(capsys):
    assert cli.main(["run", "--set", "nonsense=3"]) == 2
    assert "nonsense" in capsys.readouterr().err


def test_invalid_config_reports_every_violation(capsys):
    code = cli.main(
        ["run", *COMPACT, "--set", "dt=0.0003", "--set", "probe_a=1.3"]
    )
    assert code == 2
    err = capsys.readouterr().err
    assert "integer number of steps" in err
    assert "a < 1+w" in err


def test_preset_requires_a_name(capsys):
    assert cli.main(["preset"]) == 2
    assert "preset" in capsys.readouterr().err


def test_preset_fig5_reports_crossing(tmp_path, capsys):
    out = tmp_path / "fig5"
    code = cli.main(
        [
            "preset", "fig5", "--out", str(out), "--workers", "2",
            "--set", "x_max=50", "--set", "n_cells=5000",
            "--set", "absorber_start=40", "--set", "t_end=3",
        ]
    )
    assert code == 0
    assert {p.name for p in out.glob("*.csv")} == {"nobarrier.csv", "h10_w0.2.csv"}
    summary = json.loads((out / "summary.json").read_text())
    crossing = summary["crossing"]
    assert 1.2 <= crossing["t"] <= 1.8
    assert 0.05 <= crossing["P"] <= 0.15
    assert "crossing:" in capsys.readouterr().out
    manifest = read_manifest(out / "manifest.json")
    assert [r["name"] for r in manifest["runs"]] == ["nobarrier", "h10_w0.2"]


def test_sweep_runs_cartesian_product(tmp_path, capsys):
    out = tmp_path / "sweep"
    code = cli.main(
        [
            "sweep", "--heights", "10,20", "--widths", "0.2",
            "--out", str(out), *COMPACT,
        ]
    )
    assert code == 0
    assert {p.name for p in out.glob("*.csv")} == {"h10_w0.2.csv", "h20_w0.2.csv"}
    assert "gamma_fit" in capsys.readouterr().out


def test_sweep_validates_every_combination_before_running(tmp_path, capsys):
    out = tmp_path / "sweep_bad"
    code = cli.main(
        [
            "sweep", "--heights", "10", "--widths", "0.2,60",
            "--out", str(out), *COMPACT,
        ]
    )
    assert code == 2
    assert "w=60" in capsys.readouterr().err
    assert not out.exists()  # nothing ran, nothing written


def test_check_flags_coarse_mesh(capsys):
    code = cli.main(
        [
            "check",
            "--set", "x_max=50", "--set", "n_cells=500",
            "--set", "absorber_start=40", "--set", "t_end=1",
        ]
    )
    assert code == 1
    out = capsys.readouterr().out
    assert "self_convergence" in out
    assert "FAIL" in out


def test_fit_missing_file_is_usage_error(tmp_path, capsys):
    assert cli.main(["fit", str(tmp_path / "absent.csv")]) == 2
    assert "absent.csv" in capsys.readouterr().err


def test_fit_headeronly_csv_is_analysis_failure(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("t,P,g,j_a,norm,energy_re,energy_im\n")
    assert cli.main(["fit", str(bad)]) == 1
    assert "analysis failure" in capsys.readouterr().err
