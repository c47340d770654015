"""
TOML loader of the scenario configuration.

Every section of the file maps onto one block dataclass of `ScenarioConfig`; keys not listed in the
block are rejected, as are values of the wrong type or outside their range. The `[schedule]` section
only holds the optional `path` of a schedule file, relative to the config file
"""
from __future__ import annotations

import dataclasses
import math
import os
import re
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from typing import Any, Callable, Dict, Optional

from src import (ScenarioConfig, CalibrationBlock, MultiplexedBlock, MemoryBlock, GridBlock, TomographyBlock, AfcBlock,
                 DEFAULT_CONFIG_PATH)
from src.exceptions import ScenarioConfigError
from src.memory.afc import TOOTH_SHAPES

BLOCKS = {
    "calibration": CalibrationBlock,
    "multiplexed": MultiplexedBlock,
    "memory": MemoryBlock,
    "grid": GridBlock,
    "tomography": TomographyBlock,
    "afc": AfcBlock,
}

_TOML_LINE_RE = re.compile(r"line (\d+)")


def _fraction(value) -> Optional[str]:
    return None if 0 <= value <= 1 else "must be in [0, 1]"


def _leak(value) -> Optional[str]:
    return None if 0 <= value < 1 else "must be in [0, 1)"


def _non_negative(value) -> Optional[str]:
    return None if value >= 0 else "must be non-negative"


def _positive(value) -> Optional[str]:
    return None if value > 0 else "must be positive"


def _finesse(value) -> Optional[str]:
    return None if value > 1 else "must be greater than 1"


def _tooth_shape(value) -> Optional[str]:
    return None if value in TOOTH_SHAPES else f"must be one of {sorted(TOOTH_SHAPES)}"


# keys with no entry only need the right type
_CHECKS: Dict[str, Dict[str, Callable[[Any], Optional[str]]]] = {
    "calibration": {"mu": _non_negative, "eta_sw": _fraction, "noise_rate": _fraction,
                    "detection_window_us": _positive, "eta_detect": _fraction},
    "multiplexed": {"mu": _non_negative, "eta_sw_f1": _fraction, "eta_sw_f2": _fraction, "noise_rate": _fraction,
                    "eta_detect": _fraction, "leak_fig3c": _leak, "leak_fig4": _leak,
                    "conversion_depolarization": _fraction, "trials": _positive},
    "memory": {"depolarization": _fraction, "delta_hz": _positive, "bandwidth_hz": _positive,
               "t_spin_us": _non_negative, "bin_width_us": _positive, "histogram_end_us": _positive,
               "trials": _positive},
    "grid": {"nf": _positive, "nt": _positive, "ns": _positive, "slot_pitch_us": _positive,
             "spectral_spacing_hz": _positive, "min_spin_time_us": _non_negative, "control_lead_us": _non_negative},
    "tomography": {"exposure": _positive, "resamples": _positive, "seed": _non_negative},
    "afc": {"pit_width_hz": _positive, "finesse": _finesse, "peak_od": _non_negative, "background_od": _non_negative,
            "line_od": _non_negative, "resolution_hz": _positive, "tooth_shape": _tooth_shape},
}


def _check_type(section: str, key: str, value: Any, expected: type):
    # bool is an int subclass, and an int is fine where a float is expected
    if isinstance(value, bool) and expected is not bool:
        raise ScenarioConfigError(f"expected {expected.__name__}, got a boolean", section, key)

    if expected is float:
        if not isinstance(value, (int, float)):
            raise ScenarioConfigError(f"expected a number, got {type(value).__name__}", section, key)
        if not math.isfinite(value):
            raise ScenarioConfigError(f"expected a finite number, got {value}", section, key)
    elif not isinstance(value, expected):
        raise ScenarioConfigError(f"expected {expected.__name__}, got {type(value).__name__}", section, key)


def _parse_block(section: str, table: Any):
    block_cls = BLOCKS[section]

    if not isinstance(table, dict):
        raise ScenarioConfigError("expected a table of key = value pairs", section)

    block_fields = {f.name: f for f in dataclasses.fields(block_cls)}
    for key, value in table.items():
        if key not in block_fields:
            raise ScenarioConfigError(f"unknown key, expected one of {sorted(block_fields)}", section, key)

        _check_type(section, key, value, block_fields[key].type)

        check = _CHECKS.get(section, {}).get(key)
        problem = check(value) if check is not None else None
        if problem is not None:
            raise ScenarioConfigError(f"{problem}, got {value}", section, key)

    values = {key: float(value) if block_fields[key].type is float else value for key, value in table.items()}
    return block_cls(**values)


def _parse_schedule_section(table: Any, config_dir: str) -> Optional[str]:
    if not isinstance(table, dict):
        raise ScenarioConfigError("expected a table of key = value pairs", "schedule")

    unknown = sorted(set(table) - {"path"})
    if unknown:
        raise ScenarioConfigError("unknown key, expected 'path'", "schedule", unknown[0])
    if "path" not in table:
        return None

    path = table["path"]
    if not isinstance(path, str):
        raise ScenarioConfigError(f"expected str, got {type(path).__name__}", "schedule", "path")

    path = path if os.path.isabs(path) else os.path.normpath(os.path.join(config_dir, path))
    if not os.path.isfile(path):
        raise ScenarioConfigError(f"schedule file {path} does not exist", "schedule", "path")

    return path


def parse_scenario_config(text: str, config_dir: str = ".", config_path: Optional[str] = None) -> ScenarioConfig:
    """
    Build a ScenarioConfig from the text of a TOML config. Missing sections and keys keep their
    defaults

    Raises:
        ScenarioConfigError: on TOML syntax errors (with the line reported by the decoder), unknown
            sections or keys, wrong types and out of range values

    """
    try:
        document = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        match = _TOML_LINE_RE.search(str(e))
        raise ScenarioConfigError(f"invalid TOML: {e}", line=int(match.group(1)) if match else None) from None

    unknown = sorted(set(document) - set(BLOCKS) - {"schedule"})
    if unknown:
        raise ScenarioConfigError(f"unknown section, expected one of {sorted(BLOCKS) + ['schedule']}", unknown[0])

    blocks = {section: _parse_block(section, document[section]) for section in BLOCKS if section in document}
    schedule_path = _parse_schedule_section(document["schedule"], config_dir) if "schedule" in document else None

    config = ScenarioConfig(config_path=config_path, schedule_path=schedule_path, **blocks)
    config.random_seed = config.tomography.seed

    return config


def load_scenario_config(path: str = DEFAULT_CONFIG_PATH,
                         scenario: Optional[str] = None,
                         seed: Optional[int] = None,
                         out_dir: Optional[str] = None,
                         log_wandb: bool = False) -> ScenarioConfig:
    """
    Read the config file at `path` and apply the command line overrides: `seed` replaces the
    tomography seed, which is the single seed every scenario derives its random streams from

    Raises:
        OSError: if the file can't be read
        ScenarioConfigError: if its content is invalid

    """
    with open(path, "rb") as f:
        text = f.read().decode("utf-8")

    config = parse_scenario_config(text, config_dir=os.path.dirname(os.path.abspath(path)), config_path=path)

    if seed is not None:
        if seed < 0:
            raise ScenarioConfigError(f"seed must be non-negative, got {seed}", "tomography", "seed")
        config.random_seed = seed
        config.tomography = dataclasses.replace(config.tomography, seed=seed)

    config.scenario = scenario
    config.out_dir = out_dir
    config.log_wandb = log_wandb

    return config
