from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence

import pandas as pd
from cytoolz import merge_with
from tqdm import tqdm

from src.exceptions import ExecutionError, ReportingError
from src.memory.detection import MemoryCalibration, CountHistogram, expected_counts, BIN_WIDTH_US, HISTOGRAM_END_US
from src.mux.conversion import PulseTimeline
from src.mux.modes import ChannelPayload, ModeId
from src.qutrit.channels import apply_channel, depolarizing_process
from src.tomography.bootstrap import bootstrap_error
from src.tomography.settings import TomographySettings, CountRecord, DEFAULT_SETTINGS
from src.tomography.state_tomography import simulate_counts, reconstruct_state, expected_records
from src.evaluation.metrics import StateFidelity
from src.utils import make_rng, spawn_seeds, SeedLike


@dataclass(frozen=True, eq=False)
class ConversionResult:
    payloads: List[ChannelPayload]
    histogram: CountHistogram
    timeline: PulseTimeline
    detection_probability: Dict[str, float]
    inputs: Dict[ModeId, ChannelPayload]


def channel_label(payload: ChannelPayload, payloads: Sequence[ChannelPayload]) -> str:
    """Output label, suffixed with the source when several sources were merged into the same output"""
    shared = sum(1 for other in payloads if other.mode == payload.mode) > 1
    return f"{payload.mode.label}<-{payload.origin.label}" if shared else payload.mode.label


def execute_conversion(payloads: Sequence[ChannelPayload],
                       plan: PulseTimeline,
                       cal: MemoryCalibration,
                       trials: int,
                       seed: SeedLike = 42,
                       depolarization: float = 0.0,
                       bin_width_us: float = BIN_WIDTH_US,
                       end_us: float = HISTOGRAM_END_US) -> ConversionResult:
    """
    Run a planned conversion on the stored payloads.

    Each output payload carries its source state sent through the depolarizing channel of strength
    `depolarization` (the state object itself when 0), the fraction of the mean photon number given by
    its read-out weight and the split phase as metadata. The histogram sums all opened gates on top
    of the noise floor; merged outputs add their counts

    Raises:
        ExecutionError: if the plan and the payloads don't address the same input modes

    """
    by_mode = {payload.mode: payload for payload in payloads}
    if len(by_mode) != len(payloads):
        raise ExecutionError("Duplicate payload modes")

    plan_sources = set(plan.sources)
    if plan_sources != set(by_mode):
        missing = sorted(m.label for m in plan_sources - set(by_mode))
        extra = sorted(m.label for m in set(by_mode) - plan_sources)
        raise ExecutionError(f"Plan and payloads don't match: no payload for {missing}, no plan for {extra}")

    channel = depolarizing_process(depolarization) if depolarization > 0 else None

    outputs = []
    retrievals = []
    for entry in plan.entries:
        if entry.dropped:
            continue

        source = by_mode[entry.source]
        state = source.state
        if state is not None and channel is not None:
            state = apply_channel(channel, state)

        out_payload = ChannelPayload(mode=entry.output,
                                     state=state,
                                     mean_photons=source.mean_photons * entry.weight,
                                     source=entry.source,
                                     split_ratio=entry.weight,
                                     relative_phase=entry.phase)
        outputs.append(out_payload)
        retrievals.append((entry.t_out_us, cal.signal_probability(mu=out_payload.mean_photons, f=entry.source.f)))

    edges, means = expected_counts(cal, retrievals, trials, bin_width_us, end_us)
    histogram = CountHistogram(edges, make_rng(seed).poisson(means), trials)

    probabilities = {channel_label(payload, outputs): probability
                     for payload, (_, probability) in zip(outputs, retrievals)}

    return ConversionResult(payloads=outputs, histogram=histogram, timeline=plan,
                            detection_probability=probabilities, inputs=by_mode)


def measure_channels(result: ConversionResult,
                     cal: MemoryCalibration,
                     exposure: int,
                     seed: SeedLike = 42,
                     settings: TomographySettings = DEFAULT_SETTINGS,
                     exact: bool = False) -> Dict[str, List[CountRecord]]:
    """
    Tomography counts of every output channel carrying a qutrit. Channel c draws from stream c of
    `seed`; `exact` returns expected counts instead
    """
    records = {}
    channel_seeds = spawn_seeds(seed, len(result.payloads))

    for payload, channel_seed in zip(result.payloads, channel_seeds):
        if payload.state is None:
            continue

        label = channel_label(payload, result.payloads)
        probability = result.detection_probability[label]

        if exact:
            records[label] = expected_records(payload.state, settings, exposure, cal.noise_rate, probability)
        else:
            records[label] = simulate_counts(payload.state, settings, exposure, cal.noise_rate, channel_seed,
                                             probability)

    return records


def channel_fidelity_report(result: ConversionResult,
                            records: Mapping[str, Sequence[CountRecord]],
                            reference_states: Optional[Mapping[ModeId, object]] = None,
                            settings: TomographySettings = DEFAULT_SETTINGS,
                            resamples: int = 100,
                            seed: SeedLike = 42,
                            show_progress: bool = False) -> pd.DataFrame:
    """
    One row per output channel: label, source, fidelity of the reconstructed state to the reference
    (the state stored in the source channel when not given) and its bootstrap standard deviation

    Raises:
        ReportingError: if some output channel has no counts

    """
    labelled = [(channel_label(p, result.payloads), p) for p in result.payloads if p.state is not None]

    missing = [label for label, _ in labelled if label not in records]
    if missing:
        raise ReportingError(f"No tomography counts for output channels {missing}")

    channel_seeds = spawn_seeds(seed, len(labelled))

    rows = []
    for (label, payload), channel_seed in tqdm(list(zip(labelled, channel_seeds)), desc="Channel tomography",
                                               disable=not show_progress):
        if reference_states is not None and payload.origin in reference_states:
            target = reference_states[payload.origin]
        else:
            target = result.inputs[payload.origin].state

        fidelity_metric = StateFidelity(target, name=label)

        rho_hat = reconstruct_state(records[label], settings).rho_hat
        fidelity = fidelity_metric(rho_hat)
        std = bootstrap_error(records[label], settings, resamples, channel_seed, figure_of_merit=fidelity_metric)

        rows.append({"channel": label, "source": payload.origin.label, "fidelity": fidelity, "std": std})

    # from list of dicts to dict of lists
    return pd.DataFrame(merge_with(list, *rows)) if rows else pd.DataFrame(columns=["channel", "source",
                                                                                     "fidelity", "std"])
