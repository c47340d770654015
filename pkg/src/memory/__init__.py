from src.memory.afc import (FILTER_WINDOW_HZ, AfcComb, PreparationParameters, SpectralProfile, ToothShape, SquareTooth,
                            GaussianTooth, filter_transmits, build_spectral_structure, echo_amplitude, echo_efficiency,
                            scan_echo_delay, temporal_capacity, spectral_capacity, multimode_capacity)
from src.memory.timeline import StorageTimeline, storage_timeline
from src.memory.detection import (MemoryCalibration, CountHistogram, simulate_detection, snr, expected_counts,
                                  histogram_edges, pulse_profile)
