import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

_THIS_DIR = os.path.dirname(os.path.abspath(__file__))
ROOT_PATH = str(Path(os.path.join(_THIS_DIR, "..")).resolve())

CONFIGS_DIR = os.path.join(ROOT_PATH, "configs")
SCHEDULES_DIR = os.path.join(CONFIGS_DIR, "schedules")
DEFAULT_CONFIG_PATH = os.path.join(CONFIGS_DIR, "default.toml")
REPORTS_DIR = os.path.join(ROOT_PATH, "reports")
METRICS_DIR = os.path.join(REPORTS_DIR, "metrics")


@dataclass
class CalibrationBlock:
    # single-mode storage: mean photon number, spin-wave efficiency, noise per detection window
    mu: float = 1.12
    eta_sw: float = 0.0551
    noise_rate: float = 3.9866e-4
    detection_window_us: float = 1.0
    eta_detect: float = 0.25


@dataclass
class MultiplexedBlock:
    # two-comb storage and mode conversion
    mu: float = 1.04
    eta_sw_f1: float = 0.0505
    eta_sw_f2: float = 0.0513
    noise_rate: float = 5.9098e-4
    eta_detect: float = 0.25
    leak_fig3c: float = 0.0015
    leak_fig4: float = 0.0156
    conversion_depolarization: float = 0.0263
    trials: int = 1_000_000


@dataclass
class MemoryBlock:
    depolarization: float = 0.0328
    delta_hz: float = 200e3
    bandwidth_hz: float = 2e6
    t_spin_us: float = 7.68
    bin_width_us: float = 0.1
    histogram_end_us: float = 20.0
    trials: int = 1_000_000


@dataclass
class GridBlock:
    nf: int = 2
    nt: int = 2
    ns: int = 3
    slot_pitch_us: float = 2.0
    spectral_spacing_hz: float = 80e6
    min_spin_time_us: float = 1.0
    control_lead_us: float = 0.5


@dataclass
class TomographyBlock:
    exposure: int = 1_000_000
    resamples: int = 100
    seed: int = 42


@dataclass
class AfcBlock:
    pit_width_hz: float = 16e6
    finesse: float = 4.0
    peak_od: float = 4.0
    background_od: float = 0.2
    line_od: float = 6.0
    resolution_hz: float = 10e3
    tooth_shape: str = "square"


@dataclass
class ScenarioConfig:

    scenario: Optional[str] = None
    config_path: Optional[str] = None
    out_dir: Optional[str] = None
    random_seed: int = 42
    log_wandb: bool = False
    schedule_path: Optional[str] = None

    calibration: CalibrationBlock = field(default_factory=CalibrationBlock)
    multiplexed: MultiplexedBlock = field(default_factory=MultiplexedBlock)
    memory: MemoryBlock = field(default_factory=MemoryBlock)
    grid: GridBlock = field(default_factory=GridBlock)
    tomography: TomographyBlock = field(default_factory=TomographyBlock)
    afc: AfcBlock = field(default_factory=AfcBlock)

    @property
    def scenario_out_dir(self) -> str:
        base_dir = self.out_dir if self.out_dir is not None else METRICS_DIR
        return os.path.join(base_dir, self.scenario) if self.scenario is not None else base_dir
