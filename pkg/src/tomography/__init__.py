from src.tomography.settings import (NINE_STATES, NINE_STATE_LABELS, TomographySettings, DEFAULT_SETTINGS, CountRecord,
                                    records_to_frame, records_from_frame, save_records_csv, load_records_csv)
from src.tomography.state_tomography import (TomographyResult, simulate_counts, expected_records, reconstruct_state,
                                            linear_inversion)
from src.tomography.process_tomography import (CLASSICAL_BOUND, BoundVerdict, reconstruct_process, process_fidelity,
                                              average_fidelity, classical_bound_check, project_cptp)
from src.tomography.bootstrap import bootstrap_error, bootstrap_metrics, bootstrap_process_error, resample_records
