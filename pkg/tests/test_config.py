import os

import pytest

from src import (DEFAULT_CONFIG_PATH, CalibrationBlock, MultiplexedBlock, MemoryBlock, GridBlock, TomographyBlock,
                 AfcBlock)
from src.config import parse_scenario_config, load_scenario_config
from src.exceptions import ScenarioConfigError


def test_default_file_matches_defaults():
    config = load_scenario_config(DEFAULT_CONFIG_PATH, scenario="fig2a")

    assert config.calibration == CalibrationBlock()
    assert config.multiplexed == MultiplexedBlock()
    assert config.memory == MemoryBlock()
    assert config.grid == GridBlock()
    assert config.tomography == TomographyBlock()
    assert config.afc == AfcBlock()
    assert config.schedule_path is None
    assert config.random_seed == 42
    assert config.scenario == "fig2a"


def test_missing_keys_keep_defaults():
    config = parse_scenario_config("[calibration]\nmu = 2\n")

    assert config.calibration.mu == 2.0
    assert isinstance(config.calibration.mu, float)
    assert config.calibration.eta_sw == CalibrationBlock().eta_sw
    assert config.grid == GridBlock()


@pytest.mark.parametrize("text, section, key", [
    ("[calibration]\nmuu = 1.0\n", "calibration", "muu"),
    ("[calibration]\nmu = \"one\"\n", "calibration", "mu"),
    ("[grid]\nnf = 2.5\n", "grid", "nf"),
    ("[grid]\nnf = true\n", "grid", "nf"),
    ("[calibration]\neta_sw = 1.5\n", "calibration", "eta_sw"),
    ("[calibration]\nmu = nan\n", "calibration", "mu"),
    ("[multiplexed]\nleak_fig3c = 1.0\n", "multiplexed", "leak_fig3c"),
    ("[afc]\nfinesse = 1.0\n", "afc", "finesse"),
    ("[afc]\ntooth_shape = \"lorentzian\"\n", "afc", "tooth_shape"),
    ("[tomography]\nseed = -1\n", "tomography", "seed"),
    ("[schedule]\nfile = \"x.sched\"\n", "schedule", "file"),
], ids=["unknown-key", "string-for-float", "float-for-int", "bool-for-int", "fraction", "nan", "leak", "finesse",
        "tooth-shape", "seed", "schedule-key"])
def test_invalid_values(text, section, key):
    with pytest.raises(ScenarioConfigError) as excinfo:
        parse_scenario_config(text)

    assert excinfo.value.section == section
    assert excinfo.value.key == key
    assert str(excinfo.value).startswith(f"[{section}].{key}:")


def test_unknown_section():
    with pytest.raises(ScenarioConfigError, match="unknown section") as excinfo:
        parse_scenario_config("[detector]\nefficiency = 0.5\n")

    assert excinfo.value.section == "detector"


def test_toml_syntax_error_reports_line():
    with pytest.raises(ScenarioConfigError, match="^line 3:") as excinfo:
        parse_scenario_config("[calibration]\nmu = 1.0\neta_sw = \n")

    assert excinfo.value.line == 3


def test_schedule_path_is_relative_to_config(tmp_path):
    (tmp_path / "schedules").mkdir()
    (tmp_path / "schedules" / "swap.sched").write_text("f1t1 retime t2\n")
    config_file = tmp_path / "config.toml"
    config_file.write_text("[schedule]\npath = \"schedules/swap.sched\"\n")

    config = load_scenario_config(str(config_file))

    assert config.schedule_path == os.path.join(str(tmp_path), "schedules", "swap.sched")


def test_missing_schedule_file(tmp_path):
    config_file = tmp_path / "config.toml"
    config_file.write_text("[schedule]\npath = \"missing.sched\"\n")

    with pytest.raises(ScenarioConfigError, match="does not exist"):
        load_scenario_config(str(config_file))


def test_seed_override():
    config = load_scenario_config(DEFAULT_CONFIG_PATH, seed=7, out_dir="out")

    assert config.random_seed == 7
    assert config.tomography.seed == 7
    assert config.scenario_out_dir == "out"

    with pytest.raises(ScenarioConfigError):
        load_scenario_config(DEFAULT_CONFIG_PATH, seed=-1)


def test_missing_config_file(tmp_path):
    with pytest.raises(OSError):
        load_scenario_config(str(tmp_path / "missing.toml"))
