"""
Scenarios at the statistics of the default configuration, compared against their reference values.
Select them with `pytest -m slow`
"""
import json

import pandas as pd
import pytest

from pipeline import main, EXIT_OK
from src.scenarios.table1 import TABLE1_ROWS

pytestmark = pytest.mark.slow


def run_report(tmp_path, scenario, *extra_args):
    assert main(["run", scenario, "--out", str(tmp_path), *extra_args]) == EXIT_OK

    with open(tmp_path / scenario / "report.json") as f:
        return json.load(f)


def test_single_mode_snr(tmp_path):
    metrics = run_report(tmp_path, "fig2a")["metrics"]

    assert metrics["snr"]["value"] == pytest.approx(39.7, rel=0.2)
    assert metrics["eta_sw_estimate"]["value"] == pytest.approx(0.0551, rel=0.1)
    assert metrics["snr_intercept"]["value"] == pytest.approx(0.0, abs=2.0)


def test_process_tomography(tmp_path):
    report = run_report(tmp_path, "qpt")
    metrics = report["metrics"]

    assert metrics["process_fidelity"]["value"] == pytest.approx(0.909, abs=0.02)
    assert 0 < metrics["process_fidelity"]["std"] < 0.01
    assert metrics["chi_trace_preservation_residual"]["value"] < 1e-4
    assert report["classical_bound"]["passed"]


def test_multiplexed_crosstalk(tmp_path):
    metrics = run_report(tmp_path, "fig3c")["metrics"]

    assert metrics["n_modes"]["value"] == 12
    assert metrics["crosstalk_min"]["value"] == pytest.approx(19.7, rel=0.3)


def test_qutrit_storage_and_conversion(tmp_path):
    report = run_report(tmp_path, "fig4")
    metrics = report["metrics"]

    assert metrics["crosstalk_min"]["value"] == pytest.approx(15.2, rel=0.3)
    assert metrics["storage_fidelity_mean"]["value"] > metrics["conversion_fidelity_mean"]["value"]
    assert report["fidelity_band"]["storage_in_band"]
    assert report["fidelity_band"]["conversion_in_band"]


def test_conversion_operations(tmp_path):
    report = run_report(tmp_path, "table1")
    metrics = report["metrics"]

    for row in TABLE1_ROWS:
        assert metrics[row.name]["value"] == pytest.approx(row.reference, abs=0.03), row.name
    assert metrics["max_abs_deviation"]["value"] < 0.03
    assert report["split_rows_lowest"]

    table = pd.read_csv(tmp_path / "table1" / "table1.csv", index_col="row")
    split = table["operation"] == "split"

    assert report["split_count_fraction"] == pytest.approx(0.5, rel=0.05)
    assert table.loc[split, "relative_noise"].min() > 1.9 * table.loc[~split, "relative_noise"].max()


def test_conversion_operations_reproducible(tmp_path):
    config = tmp_path / "small.toml"
    config.write_text("[multiplexed]\ntrials = 20000\n\n[tomography]\nexposure = 20000\nresamples = 100\n")

    first = run_report(tmp_path / "a", "table1", "-c", str(config), "--seed", "3")
    second = run_report(tmp_path / "b", "table1", "-c", str(config), "--seed", "3")

    assert first == second
    assert (tmp_path / "a" / "table1" / "table1.csv").read_bytes() == \
           (tmp_path / "b" / "table1" / "table1.csv").read_bytes()
