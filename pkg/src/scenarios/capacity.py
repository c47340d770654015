"""
Multimode capacity arithmetic and the spectral structure of the double comb. No randomness
"""
import pandas as pd

from src import ScenarioConfig
from src.evaluation import metric_entry
from src.memory.afc import (AfcComb, PreparationParameters, build_spectral_structure, temporal_capacity,
                            spectral_capacity, multimode_capacity)
from src.mux.modes import mode_grid
from src.scenarios.common import save_scenario

# inhomogeneous linewidth available for spectral channels
TOTAL_BANDWIDTH_HZ = 5e9

# size of the grid reachable with the full spectral, temporal and spatial resources
EXTENDED_GRID = (60, 50, 51)


def capacity_main(config: ScenarioConfig):
    grid = config.grid
    afc = config.afc

    comb = AfcComb(delta_hz=config.memory.delta_hz, bandwidth_hz=config.memory.bandwidth_hz)
    prep = PreparationParameters.double_comb(separation_hz=grid.spectral_spacing_hz,
                                             delta_hz=config.memory.delta_hz,
                                             bandwidth_hz=config.memory.bandwidth_hz,
                                             finesse=afc.finesse,
                                             peak_od=afc.peak_od,
                                             background_od=afc.background_od,
                                             tooth_shape=afc.tooth_shape,
                                             pit_width_hz=afc.pit_width_hz,
                                             line_od=afc.line_od,
                                             resolution_hz=afc.resolution_hz)
    profile = build_spectral_structure(prep)

    n_temporal = temporal_capacity(comb)
    n_spectral = spectral_capacity(TOTAL_BANDWIDTH_HZ, grid.spectral_spacing_hz)
    teeth = profile.teeth_per_comb()
    centers = profile.comb_centers()

    print(f"Temporal capacity {n_temporal}, spectral capacity {n_spectral}, teeth per comb {teeth}")

    metrics = {
        "grid_modes": metric_entry(len(mode_grid(grid.nf, grid.nt, grid.ns)), "analytic", reference=12),
        "extended_grid_modes": metric_entry(multimode_capacity(*EXTENDED_GRID), "analytic", reference=153000),
        "temporal_capacity": metric_entry(n_temporal, "analytic", reference=10),
        "spectral_capacity": metric_entry(n_spectral, "analytic", reference=62),
        "comb_separation_hz": metric_entry(centers[1] - centers[0], "analytic", reference=80e6),
    }
    for i, n_teeth in enumerate(teeth, start=1):
        metrics[f"teeth_comb_f{i}"] = metric_entry(n_teeth, "analytic", reference=n_temporal)

    artifacts = {
        "spectral_profile.csv": pd.DataFrame({"detuning_hz": profile.detuning_hz,
                                              "optical_depth": profile.optical_depth}),
    }

    return save_scenario(config, metrics, artifacts)
