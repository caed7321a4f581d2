import json
from dataclasses import replace

import numpy as np
import pytest

from hemtq import cli
from hemtq.config import apply_overrides, profile_defaults
from hemtq.output import emit_outputs
from hemtq.scenarios import run_coherence, run_full, run_reduced, run_sweep

TINY = ("scenario.horizon=1.6", "scenario.coherence_t0=0.2",
        "scenario.coherence_lag=0.4")


@pytest.fixture(scope="module")
def tiny():
    return apply_overrides(profile_defaults(), TINY)


def _header(path):
    return path.read_text().splitlines()[0]


def test_golden_headers(tiny, tmp_path):
    emit_outputs(run_reduced(tiny), tiny, tmp_path / "r")
    assert _header(tmp_path / "r" / "timeseries.csv") == (
        "time_ns,nph1,nph2,xcorr_re,xcorr_im,discord,nu_minus,nu_plus"
    )
    for sig in ("nph1", "nph2", "xcorr", "discord"):
        assert _header(tmp_path / "r" / f"spectrum_{sig}.csv") == "freq_ghz,magnitude,label"
    emit_outputs(run_coherence(tiny), tiny, tmp_path / "c")
    names = sorted(p.name for p in (tmp_path / "c").glob("*.csv"))
    assert names == [f"coherence_{k}_mode{m}.csv" for k in ("full", "reduced") for m in (1, 2)]
    assert _header(tmp_path / "c" / names[0]) == "tau_ns,g1_abs,corr_re,corr_im,population"


def test_summary_records_every_check(tiny, tmp_path):
    emit_outputs(run_full(tiny), tiny, tmp_path)
    doc = json.loads((tmp_path / "summary.json").read_text())
    assert doc["scenario"] == "full"
    checks = {c["check"] for c in doc["audit"]["checks"]}
    assert {"trace_drift", "hermiticity_drift", "min_eigenvalue", "nu_minus_floor"} <= checks
    for c in doc["audit"]["checks"]:
        assert set(c) == {"check", "measured", "bound", "passed"}
    assert doc["config"]["scenario"]["horizon"] == 1.6
    assert "xcorr" in doc["results"]["peaks"]


def test_one_value_sweep_equals_full(tiny):
    single = replace(tiny, sweep_gm3=(tiny.circuit.gm3,))
    sweep = run_sweep(single)
    full = run_full(tiny)
    (child,) = sweep.children
    for col, values in full.tables["timeseries"].items():
        np.testing.assert_array_equal(child.tables["timeseries"][col], values)


def test_sweep_entries_fail_independently(tiny):
    # phi2_dc chosen so that C_M^2 vanishes exactly at gm3 = 0.05
    d_ca = 300e-12 * 2 + 107e-15 + 60e-15
    cb = 300e-12 + 60e-15
    phi2 = -(d_ca - 60e-15 ** 2 / cb) / (6 * 0.05 * tiny.circuit.dphi1dt_dc)
    cfg = replace(tiny, sweep_gm3=(0.01, 0.05), circuit=replace(tiny.circuit, phi2_dc=phi2))
    result = run_sweep(cfg)
    assert result.summary["failed_entries"] == 1
    assert [c.name for c in result.children] == ["gm3_10mAV3"]
    (bad,) = [c for c in result.summary["comparison"] if c["error"]]
    assert "SingularCircuitError" in bad["error"]


def test_decoupled_closed_oscillator_keeps_its_photons():
    cfg = apply_overrides(profile_defaults(), TINY + ("environment.kappa1=0", "environment.kappa2=0",
                                                      "circuit.cc=1e6"))
    t = run_reduced(cfg).tables["timeseries"]
    assert np.ptp(t["nph2"]) < 1e-9
    assert t["nph2"][0] == pytest.approx(abs(cfg.alpha) ** 2, abs=1e-3)


def test_free_coherent_panels_stay_coherent():
    cfg = apply_overrides(profile_defaults(), TINY + ("environment.kappa1=0", "environment.kappa2=0",
                                                      "circuit.cc=1e6"))
    result = run_coherence(cfg)
    g = result.tables["coherence_reduced_mode2"]["g1_abs"]
    assert np.max(np.abs(g - 1.0)) < 1e-6


def test_linear_full_model_has_no_nonlinear_terms(tiny):
    cfg = replace(tiny, circuit=replace(tiny.circuit, gm2=0.0, gm3=0.0, dphi1dt_dc=0.0))
    coeffs = run_full(cfg).summary["coefficients"]
    assert all(coeffs[f"n{k}"] == 0.0 for k in range(1, 7))


def test_plots_are_written(tiny, tmp_path):
    files = emit_outputs(run_reduced(replace(tiny, plot=True)), None, tmp_path)
    svgs = [p for p in files if p.suffix == ".svg"]
    assert len(svgs) == 6
    assert svgs[0].read_text().startswith("<svg")


def test_unwritable_output_directory(tiny, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(OSError, match="file"):
        emit_outputs(run_reduced(tiny), tiny, blocker / "out")


# -- command line -----------------------------------------------------------------

def test_cli_success(tmp_path, capsys):
    rc = cli.main(["reduced", "--out", str(tmp_path), *sum((["--override", o] for o in TINY), [])])
    assert rc == 0
    assert (tmp_path / "summary.json").exists()
    assert "timeseries.csv" in capsys.readouterr().out


def test_cli_config_helpers(tmp_path, capsys):
    assert cli.main(["config", "print-defaults"]) == 0
    text = capsys.readouterr().out
    path = tmp_path / "ref.ini"
    path.write_text(text)
    assert cli.main(["config", "check", str(path)]) == 0
    path.write_text("[scenario]\nfock_dims = 1, 8\n")
    assert cli.main(["config", "check", str(path)]) == 1
    assert "scenario.fock_dims" in capsys.readouterr().err


def test_cli_errors_exit_one(tmp_path, capsys):
    assert cli.main(["full", "--override", "scenario.nope=1"]) == 1
    assert cli.main(["full", "--config", str(tmp_path / "missing.ini")]) == 1
    assert "hemtq: error" in capsys.readouterr().err


def test_cli_audit_failure_exits_two(tmp_path, capsys):
    # alpha = 2 in eight levels is visibly truncated: nu- drops below one
    rc = cli.main(["reduced", "--out", str(tmp_path), *sum((["--override", o] for o in TINY), []),
                   "--override", "scenario.alpha=2"])
    assert rc == 2
    assert "nu_minus_floor" in capsys.readouterr().err
    doc = json.loads((tmp_path / "summary.json").read_text())
    assert doc["audit"]["passed"] is False


def test_cli_sweep_jobs(tmp_path):
    args = ["sweep", "--jobs", "2", "--out", str(tmp_path), *sum((["--override", o] for o in TINY), [])]
    assert cli.main(args) == 0
    assert (tmp_path / "discord_gm3_120mAV3.csv").exists()
    assert (tmp_path / "gm3_10mAV3_timeseries.csv").exists()
