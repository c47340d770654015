"""
Multiplexed storage of qutrits in the (f, t) channels followed by a quantum mode conversion: the
crosstalk of the channels, the fidelity of each stored qutrit and the fidelity after conversion.

The conversion is read from the configured schedule file, by default the one swapping the spectral
and temporal indices of the channels.

Random streams: 0 crosstalk matrix, 1 storage run, 2 conversion run (see convert_and_measure for
the streams within a run)
"""
import os

import pandas as pd

from src import ScenarioConfig
from src.evaluation import metric_entry, summarize_results
from src.memory.calibration import multiplexed_calibration_from_config, combined_depolarization
from src.mux.conversion import TimingParameters, plan_conversion
from src.mux.crosstalk import run_multiplexed, crosstalk_min
from src.mux.modes import ChannelPayload, ModeId
from src.qutrit.states import PSI_1, ket_to_density
from src.scenarios.common import save_scenario, schedule_path, compile_schedule_file, convert_and_measure
from src.utils import stream_seed

CROSSTALK_REFERENCE = 15.2
FIDELITY_BAND = (0.85, 0.92)
DEFAULT_SCHEDULE = "fig4_qmc.sched"


def _fidelity_table(report: pd.DataFrame, config: ScenarioConfig, prefix: str) -> pd.DataFrame:
    rows = report[["source", "fidelity", "std"]].to_dict("records")
    _, df = summarize_results(rows, report["channel"], log_wandb=config.log_wandb,
                              prefix_all_metrics=f"{prefix}_all_channels", prefix_avg_metrics=f"{prefix}_avg_channels")
    df.index.name = "channel"
    return df


def _in_band(df: pd.DataFrame) -> bool:
    return bool(df["fidelity"].between(*FIDELITY_BAND).all())


def fig4_main(config: ScenarioConfig):
    cal = multiplexed_calibration_from_config(config)
    timing = TimingParameters.from_config(config)

    modes = [ModeId(f, t) for f in range(1, timing.nf + 1) for t in range(1, timing.nt + 1)]
    state = ket_to_density(PSI_1)
    payloads = [ChannelPayload(mode, state=state, mean_photons=cal.mu) for mode in modes]

    print(f"Multiplexed storage of a qutrit in {len(modes)} channels")
    matrix = run_multiplexed(payloads, cal, config.multiplexed.leak_fig4, config.multiplexed.trials,
                             seed=stream_seed(config.random_seed, 0))
    ratio = crosstalk_min(matrix)
    print(f"Minimum crosstalk = {ratio:.2f} (reference {CROSSTALK_REFERENCE})")

    p_storage = config.memory.depolarization
    p_conversion = combined_depolarization(p_storage, config.multiplexed.conversion_depolarization)

    print("Tomography of the stored channels")
    storage_plan = plan_conversion(modes, {}, timing)
    _, storage_report = convert_and_measure(config, cal, payloads, storage_plan, p_storage,
                                            stream_seed(config.random_seed, 1))
    storage_df = _fidelity_table(storage_report, config, "fig4_storage")

    qmc_path = config.schedule_path if config.schedule_path is not None else schedule_path(DEFAULT_SCHEDULE)
    print(f"Tomography of the channels after the conversion in {os.path.basename(qmc_path)}")
    qmc_plan = compile_schedule_file(qmc_path, config)
    print(qmc_plan.summary())

    qmc_result, qmc_report = convert_and_measure(config, cal, payloads, qmc_plan, p_conversion,
                                                 stream_seed(config.random_seed, 2))
    qmc_df = _fidelity_table(qmc_report, config, "fig4_conversion")

    metrics = {
        "crosstalk_min": metric_entry(ratio, "simulated", reference=CROSSTALK_REFERENCE),
        "storage_fidelity_mean": metric_entry(storage_df["fidelity"].mean(), "simulated"),
        "storage_fidelity_min": metric_entry(storage_df["fidelity"].min(), "simulated"),
        "storage_fidelity_max": metric_entry(storage_df["fidelity"].max(), "simulated"),
        "conversion_fidelity_mean": metric_entry(qmc_df["fidelity"].mean(), "simulated"),
        "conversion_fidelity_min": metric_entry(qmc_df["fidelity"].min(), "simulated"),
        "conversion_fidelity_max": metric_entry(qmc_df["fidelity"].max(), "simulated"),
    }

    artifacts = {
        "crosstalk.csv": matrix.to_frame(),
        "storage_fidelities.csv": storage_df,
        "conversion_fidelities.csv": qmc_df,
        "conversion_histogram.csv": qmc_result.histogram.to_frame(),
    }

    extra = {"fidelity_band": {"low": FIDELITY_BAND[0], "high": FIDELITY_BAND[1],
                               "storage_in_band": _in_band(storage_df), "conversion_in_band": _in_band(qmc_df)}}

    return save_scenario(config, metrics, artifacts,
                         indexed_artifacts=("crosstalk.csv", "storage_fidelities.csv", "conversion_fidelities.csv"),
                         extra=extra)
