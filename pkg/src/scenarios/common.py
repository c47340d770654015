from __future__ import annotations

import dataclasses
import os
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src import ScenarioConfig, SCHEDULES_DIR
from src.config import BLOCKS
from src.memory.detection import MemoryCalibration
from src.mux.conversion import TimingParameters, PulseTimeline
from src.mux.executor import ConversionResult, execute_conversion, measure_channels, channel_fidelity_report
from src.mux.modes import ChannelPayload
from src.mux.schedule import load_schedule, compile_schedule
from src.utils import write_json_report, write_csv_artifact, log_wandb, stream_seed, SeedLike


def config_snapshot(config: ScenarioConfig) -> Dict[str, Any]:
    """Parameters a report depends on. Paths and output options are left out"""
    snapshot = {section: dataclasses.asdict(getattr(config, section)) for section in BLOCKS}
    snapshot["random_seed"] = config.random_seed
    snapshot["schedule"] = os.path.basename(config.schedule_path) if config.schedule_path is not None else None

    return snapshot


def schedule_path(file_name: str) -> str:
    return os.path.join(SCHEDULES_DIR, file_name)


def compile_schedule_file(path: str, config: ScenarioConfig) -> PulseTimeline:
    return compile_schedule(load_schedule(path), TimingParameters.from_config(config))


def save_scenario(config: ScenarioConfig,
                  metrics: Dict[str, dict],
                  artifacts: Dict[str, pd.DataFrame],
                  indexed_artifacts: tuple = (),
                  extra: Optional[Dict[str, Any]] = None) -> str:
    """
    Write every artifact as CSV and the JSON report listing them into the output directory of the
    scenario. Returns the path of the report
    """
    out_dir = config.scenario_out_dir

    for file_name, df in artifacts.items():
        write_csv_artifact(df, out_dir, file_name, index=file_name in indexed_artifacts)

    report = {
        "scenario": config.scenario,
        "config": config_snapshot(config),
        "metrics": metrics,
        "artifacts": sorted(artifacts),
    }
    if extra is not None:
        report.update(extra)

    report_path = write_json_report(report, out_dir)
    print(f"CSV of the results are saved into {out_dir}")
    print(f"Report saved into {report_path}")

    log_wandb(config, {f"{config.scenario}/{name}": entry["value"] for name, entry in metrics.items()
                       if entry["value"] is not None})

    return report_path


def complex_frame(matrix: np.ndarray, labels) -> pd.DataFrame:
    """Real and imaginary parts of a matrix side by side, one row per label"""
    labels = list(labels)
    real = pd.DataFrame(np.real(matrix), index=labels, columns=[f"re_{label}" for label in labels])
    imag = pd.DataFrame(np.imag(matrix), index=labels, columns=[f"im_{label}" for label in labels])

    df = pd.concat([real, imag], axis=1)
    df.index.name = "row"
    return df


def convert_and_measure(config: ScenarioConfig,
                        cal: MemoryCalibration,
                        payloads: Sequence[ChannelPayload],
                        plan: PulseTimeline,
                        depolarization: float,
                        seed: SeedLike,
                        exposure: Optional[int] = None) -> Tuple[ConversionResult, pd.DataFrame]:
    """
    Execute a conversion plan, run state tomography on every output channel and report the channel
    fidelities. Streams of `seed`: 0 execution, 1 tomography counts, 2 bootstrap
    """
    exposure = config.tomography.exposure if exposure is None else exposure

    result = execute_conversion(payloads, plan, cal, config.multiplexed.trials, stream_seed(seed, 0),
                                depolarization=depolarization,
                                bin_width_us=config.memory.bin_width_us,
                                end_us=config.memory.histogram_end_us)

    records = measure_channels(result, cal, exposure, stream_seed(seed, 1))
    report = channel_fidelity_report(result, records, resamples=config.tomography.resamples,
                                     seed=stream_seed(seed, 2), show_progress=True)

    return result, report
