import numpy as np
import pytest

from src.memory.detection import MemoryCalibration
from src.mux.conversion import TimingParameters


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def timing():
    return TimingParameters()


@pytest.fixture
def noiseless_cal():
    return MemoryCalibration(eta_sw=1.0, mu=1.0, noise_rate=0.0, eta_detect=1.0)


@pytest.fixture
def mux_cal():
    return MemoryCalibration(eta_sw=0.0505, mu=1.04, noise_rate=5.9098e-4, eta_detect=0.25,
                             eta_sw_per_comb=(0.0505, 0.0513))
