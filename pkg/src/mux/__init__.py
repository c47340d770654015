from src.mux.modes import QUTRIT_PAYLOAD, ModeId, ChannelPayload, mode_grid, spatial_labels
from src.mux.crosstalk import LeakageModel, CrosstalkMatrix, run_multiplexed, crosstalk_min
from src.mux.conversion import (Retime, FrequencyShift, Split, Drop, ConversionOp, TimingParameters, ChannelEntry,
                                PulseTimeline, plan_conversion)
from src.mux.schedule import Schedule, parse_schedule, load_schedule, compile_schedule
from src.mux.executor import (ConversionResult, execute_conversion, measure_channels, channel_fidelity_report,
                              channel_label)
