"""
Single-mode spin-wave storage: photon-count histograms with and without input photons and the
signal-to-noise ratio of the retrieved photons.

Random streams: 0 histogram at the calibrated mu, 1 histogram at mu = 0, 2 + k histogram of the
k-th mean photon number of the SNR scan
"""
import dataclasses

import numpy as np
import pandas as pd

from src import ScenarioConfig
from src.evaluation import metric_entry
from src.memory.afc import AfcComb, scan_echo_delay
from src.memory.calibration import calibration_from_config
from src.memory.detection import simulate_detection, snr
from src.memory.timeline import storage_timeline
from src.scenarios.common import save_scenario
from src.utils import stream_seed

SNR_REFERENCE = (39.7, 6.7)
SNR_SCAN_MU = (0.25, 0.5, 1.0, 2.0)


def fig2a_main(config: ScenarioConfig):
    cal = calibration_from_config(config)
    memory = config.memory

    timeline = storage_timeline(memory.delta_hz, memory.t_spin_us, control_lead_us=config.grid.control_lead_us)

    window = cal.detection_window_us
    signal_window = timeline.output_window(window)
    noise_window = (signal_window[1] + window, signal_window[1] + 2 * window)

    hist_kwargs = dict(trials=memory.trials, bin_width_us=memory.bin_width_us, end_us=memory.histogram_end_us)

    print(f"Storage of {memory.trials} pulses with mu = {cal.mu}, retrieval at {timeline.t_out_us:.2f} us")
    hist = simulate_detection(cal, timeline, seed=stream_seed(config.random_seed, 0), **hist_kwargs)
    hist_noise = simulate_detection(dataclasses.replace(cal, mu=0.0), timeline,
                                    seed=stream_seed(config.random_seed, 1), **hist_kwargs)

    snr_value = snr(hist, signal_window, noise_window)

    # noise-subtracted counts of the output window, per input photon
    signal_counts = hist.window_counts(signal_window) - hist.window_counts(noise_window)
    end_to_end = signal_counts / (memory.trials * cal.mu)

    snr_scan = []
    for k, mu in enumerate(SNR_SCAN_MU):
        scan_hist = simulate_detection(dataclasses.replace(cal, mu=mu), timeline,
                                       seed=stream_seed(config.random_seed, 2 + k), **hist_kwargs)
        snr_scan.append(snr(scan_hist, signal_window, noise_window))

    # SNR - 1 is the signal over noise ratio, proportional to mu
    slope, intercept = np.polyfit(SNR_SCAN_MU, np.array(snr_scan) - 1, 1)

    comb = AfcComb(delta_hz=memory.delta_hz,
                   bandwidth_hz=memory.bandwidth_hz,
                   finesse=config.afc.finesse,
                   peak_od=config.afc.peak_od,
                   background_od=config.afc.background_od,
                   tooth_shape=config.afc.tooth_shape)
    delays, efficiencies = scan_echo_delay(comb)
    echo_delay = float(delays[np.argmax(efficiencies)])

    print(f"SNR = {snr_value:.2f} (reference {SNR_REFERENCE[0]} +/- {SNR_REFERENCE[1]})")

    metrics = {
        "snr": metric_entry(snr_value, "simulated", *SNR_REFERENCE),
        "end_to_end_efficiency": metric_entry(end_to_end, "simulated",
                                              reference=cal.eta_sw * cal.eta_detect),
        "eta_sw_estimate": metric_entry(end_to_end / cal.eta_detect, "simulated", reference=cal.eta_sw),
        "noise_counts_mu0": metric_entry(hist_noise.window_counts(signal_window), "simulated",
                                         reference=memory.trials * cal.noise_rate),
        "snr_slope_per_photon": metric_entry(slope, "simulated", reference=cal.signal_probability(mu=1.0) /
                                             cal.noise_rate),
        "snr_intercept": metric_entry(intercept, "simulated", reference=0.0),
        "storage_time_us": metric_entry(timeline.total_storage_us, "analytic", reference=12.68),
        "afc_delay_us": metric_entry(timeline.afc_delay_us, "analytic", reference=5.0),
        "echo_delay_scan_us": metric_entry(echo_delay, "analytic", reference=comb.storage_time_us),
    }

    histogram_df = hist.to_frame().rename(columns={"counts": f"counts_mu_{cal.mu:g}"})
    histogram_df["counts_mu_0"] = hist_noise.counts

    artifacts = {
        "histogram.csv": histogram_df,
        "snr_scan.csv": pd.DataFrame({"mu": SNR_SCAN_MU, "snr": snr_scan}),
        "echo_scan.csv": pd.DataFrame({"delay_us": delays, "efficiency": efficiencies}),
    }

    extra = {"windows_us": {"signal": list(signal_window), "noise": list(noise_window)}}

    return save_scenario(config, metrics, artifacts, extra=extra)
