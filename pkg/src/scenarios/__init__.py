from src.scenarios.fig2a import fig2a_main
from src.scenarios.qpt import qpt_main
from src.scenarios.fig3c import fig3c_main
from src.scenarios.fig4 import fig4_main
from src.scenarios.table1 import table1_main
from src.scenarios.capacity import capacity_main

# name -> (one-line description, main), in the order `run all` executes them
available_scenarios = {
    "fig2a": ("single-mode storage histograms and signal-to-noise ratio", fig2a_main),
    "qpt": ("process tomography of the memory and classical bound check", qpt_main),
    "fig3c": ("crosstalk matrix of the 2 x 2 x 3 multiplexed storage", fig3c_main),
    "fig4": ("multiplexed qutrit storage and quantum mode conversion fidelities", fig4_main),
    "table1": ("fidelities of the mode conversion operations on two input states", table1_main),
    "capacity": ("multimode capacity arithmetic and double-comb spectral structure", capacity_main),
}
