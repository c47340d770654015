"""
Fit-once calibration of the free parameters of the memory model.

The experiment reports spin-wave efficiencies, signal-to-noise ratios and a process fidelity but
neither the detection efficiency nor absolute noise rates. With eta_detect fixed, the noise rate
follows from the SNR and the residual depolarization of the memory from the process fidelity; the
helpers below reproduce the constants stored in configs/default.toml
"""
from __future__ import annotations

from src import ScenarioConfig
from src.exceptions import ValidationError
from src.memory.detection import MemoryCalibration
from src.qutrit.basis import DIM


def fit_noise_rate(cal: MemoryCalibration, target_snr: float) -> float:
    """
    Noise probability per detection window giving `target_snr`, with SNR measured as counts in the
    output window (signal + noise) over counts in an equally long noise-only window
    """
    if target_snr <= 1:
        raise ValidationError(f"Target SNR must be greater than 1, got {target_snr}")

    return cal.signal_probability() / (target_snr - 1)


def noise_depolarization(relative_noise: float) -> float:
    """
    Depolarizing strength equivalent to a noise floor `relative_noise` times the signal: noise adds the
    same counts to every rank-1 projector, which is what I/3 would do
    """
    if relative_noise < 0:
        raise ValidationError(f"Relative noise must be non-negative, got {relative_noise}")

    return DIM * relative_noise / (1 + DIM * relative_noise)


def depolarizing_process_fidelity(p: float) -> float:
    # process fidelity to the identity of rho -> (1 - p) rho + p I/d
    return 1 - p + p / DIM ** 2


def depolarizing_state_fidelity(p: float) -> float:
    # fidelity between a pure state and its depolarized version
    return 1 - p + p / DIM


def fit_depolarization(target_process_fidelity: float, snr: float) -> float:
    """
    Depolarization of the storage itself such that, combined with the noise floor implied by `snr`,
    the process fidelity to the identity equals `target_process_fidelity`
    """
    if not 1 / DIM ** 2 <= target_process_fidelity <= 1:
        raise ValidationError(f"Process fidelity must be in [1/9, 1], got {target_process_fidelity}")

    x_noise = noise_depolarization(1 / (snr - 1)) if snr > 1 else 1.0
    p_total = (1 - target_process_fidelity) * DIM ** 2 / (DIM ** 2 - 1)

    p_memory = 1 - (1 - p_total) / (1 - x_noise)
    if p_memory < 0:
        raise ValidationError(f"Noise floor at SNR {snr} alone already lowers the process fidelity below "
                              f"{target_process_fidelity}")

    return p_memory


def calibration_from_config(config: ScenarioConfig) -> MemoryCalibration:
    """Single-comb calibration of the storage and process tomography runs"""
    block = config.calibration
    return MemoryCalibration(eta_sw=block.eta_sw,
                             mu=block.mu,
                             noise_rate=block.noise_rate,
                             detection_window_us=block.detection_window_us,
                             eta_detect=block.eta_detect)


def multiplexed_calibration_from_config(config: ScenarioConfig) -> MemoryCalibration:
    """Two-comb calibration of the multiplexed and mode-conversion runs"""
    block = config.multiplexed
    return MemoryCalibration(eta_sw=block.eta_sw_f1,
                             mu=block.mu,
                             noise_rate=block.noise_rate,
                             detection_window_us=config.calibration.detection_window_us,
                             eta_detect=block.eta_detect,
                             eta_sw_per_comb=(block.eta_sw_f1, block.eta_sw_f2))


def combined_depolarization(*strengths: float) -> float:
    """Strength of the single depolarizing channel equal to several applied in sequence"""
    survival = 1.0
    for p in strengths:
        if not 0 <= p <= 1:
            raise ValidationError(f"Depolarizing strength must be in [0, 1], got {p}")
        survival *= 1 - p

    return 1 - survival
