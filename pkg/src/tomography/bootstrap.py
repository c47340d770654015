from __future__ import annotations

import warnings
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from cytoolz import merge_with
from tqdm import tqdm

from src.exceptions import ValidationError, ConvergenceWarning
from src.qutrit.states import DensityMatrix, state_fidelity
from src.qutrit.channels import ProcessMatrix
from src.tomography.process_tomography import reconstruct_process, process_fidelity
from src.tomography.settings import TomographySettings, CountRecord, DEFAULT_SETTINGS
from src.tomography.state_tomography import reconstruct_state
from src.utils import spawn_seeds, make_rng, SeedLike

MIN_RESAMPLES = 100

# resampled reconstructions only need to be as accurate as the spread they measure
BOOTSTRAP_MAX_ITER = 2000

StateFigure = Callable[[DensityMatrix], float]
ProcessFigure = Callable[[ProcessMatrix], float]


def _ordered(records: Sequence[CountRecord]) -> List[CountRecord]:
    # draws are tied to record content, not to the order the caller passed them in
    return sorted(records, key=lambda r: r.sort_key)


def resample_records(records: Sequence[CountRecord], rng: np.random.Generator) -> List[CountRecord]:
    """Poisson resampling of the counts, exact records are passed through unchanged"""
    resampled = []
    for record in _ordered(records):
        if record.exact:
            resampled.append(record)
        else:
            resampled.append(CountRecord(record.setting_index, int(rng.poisson(record.counts)), record.exposure))

    return resampled


def _check_resamples(resamples: int):
    if resamples < MIN_RESAMPLES:
        raise ValidationError(f"At least {MIN_RESAMPLES} resamples are needed, got {resamples}")


def bootstrap_metrics(records: Sequence[CountRecord],
                      metrics: Dict[str, StateFigure],
                      settings: TomographySettings = DEFAULT_SETTINGS,
                      resamples: int = MIN_RESAMPLES,
                      seed: SeedLike = 42,
                      show_progress: bool = False) -> Dict[str, float]:
    """
    Standard deviation of several figures of merit over Poisson-resampled count sets.

    Resample b draws from its own child of `seed`, so the result doesn't depend on how many
    metrics are computed or on the order of `records`

    """
    _check_resamples(resamples)

    if all(record.exact for record in records):
        return {name: 0.0 for name in metrics}

    child_seeds = spawn_seeds(seed, resamples)

    results = []
    for child_seed in tqdm(child_seeds, desc="Bootstrap resamples", disable=not show_progress):
        resampled = resample_records(records, make_rng(child_seed))

        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ConvergenceWarning)
            rho_b = reconstruct_state(resampled, settings, max_iter=BOOTSTRAP_MAX_ITER).rho_hat

        results.append({name: metric(rho_b) for name, metric in metrics.items()})

    # from list of dicts to dict of lists
    results = merge_with(list, *results)

    return {name: float(np.std(values, ddof=1)) for name, values in results.items()}


def bootstrap_error(records: Sequence[CountRecord],
                    settings: TomographySettings = DEFAULT_SETTINGS,
                    resamples: int = MIN_RESAMPLES,
                    seed: SeedLike = 42,
                    figure_of_merit: Optional[StateFigure] = None,
                    show_progress: bool = False) -> float:
    """
    Bootstrap standard deviation of a state figure of merit.

    If `figure_of_merit` is not given, the fidelity of each resampled reconstruction to the
    reconstruction from the original records is used

    """
    _check_resamples(resamples)

    if figure_of_merit is None:
        if all(record.exact for record in records):
            return 0.0

        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ConvergenceWarning)
            reference = reconstruct_state(records, settings).rho_hat

        def figure_of_merit(rho: DensityMatrix) -> float:
            return state_fidelity(reference, rho)

    return bootstrap_metrics(records, {"figure_of_merit": figure_of_merit}, settings, resamples, seed,
                             show_progress)["figure_of_merit"]


def bootstrap_process_error(input_states: Sequence[DensityMatrix],
                            output_records: Sequence[Sequence[CountRecord]],
                            settings: TomographySettings = DEFAULT_SETTINGS,
                            resamples: int = MIN_RESAMPLES,
                            seed: SeedLike = 42,
                            figure_of_merit: Optional[ProcessFigure] = None,
                            show_progress: bool = False) -> float:
    """
    Bootstrap standard deviation of a process figure of merit (process fidelity to the identity by
    default). Each resample redraws the counts of every output state, reconstructs the outputs and
    then the process matrix
    """
    _check_resamples(resamples)

    if len(input_states) != len(output_records):
        raise ValidationError(f"Got {len(input_states)} input states but {len(output_records)} output record sets")

    if all(record.exact for records in output_records for record in records):
        return 0.0

    if figure_of_merit is None:
        def figure_of_merit(chi: ProcessMatrix) -> float:
            return process_fidelity(chi, np.eye(3))

    child_seeds = spawn_seeds(seed, resamples)

    values = []
    for child_seed in tqdm(child_seeds, desc="Process bootstrap resamples", disable=not show_progress):

        # one independent stream per output state
        output_seeds = child_seed.spawn(len(output_records))

        outputs_b = []
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ConvergenceWarning)

            for records, out_seed in zip(output_records, output_seeds):
                resampled = resample_records(records, make_rng(out_seed))
                outputs_b.append(reconstruct_state(resampled, settings, max_iter=BOOTSTRAP_MAX_ITER).rho_hat)

            chi_b = reconstruct_process(input_states, outputs_b)

        values.append(figure_of_merit(chi_b))

    return float(np.std(values, ddof=1))
