from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Tuple, List, Iterable, Sequence, Optional, Union, Dict, Mapping

import numpy as np
import pandas as pd

from src.exceptions import ValidationError, ReconstructionError
from src.qutrit.basis import DIM
from src.qutrit.states import QutritKet

_S2 = 1 / np.sqrt(2)

# three OAM eigenstates followed by six superpositions, amplitudes over (|L>, |G>, |R>)
NINE_STATES: Tuple[QutritKet, ...] = (
    QutritKet(np.array([1, 0, 0], dtype=complex)),
    QutritKet(np.array([0, 1, 0], dtype=complex)),
    QutritKet(np.array([0, 0, 1], dtype=complex)),
    QutritKet(np.array([1, 1, 0], dtype=complex) * _S2),
    QutritKet(np.array([0, 1, 1], dtype=complex) * _S2),
    QutritKet(np.array([1j, 1, 0], dtype=complex) * _S2),
    QutritKet(np.array([0, 1, -1j], dtype=complex) * _S2),
    QutritKet(np.array([1, 0, 1], dtype=complex) * _S2),
    QutritKet(np.array([1, 0, -1j], dtype=complex) * _S2),
)

NINE_STATE_LABELS = ("L", "G", "R", "L+G", "R+G", "iL+G", "-iR+G", "L+R", "L-iR")

RECORD_COLUMNS = ("setting_index", "counts", "exposure", "exact")


@dataclass(frozen=True, eq=False)
class TomographySettings:
    """
    Preparation states and measurement projectors of a tomography run.

    The same states are used both as inputs of process tomography and, through their rank-1
    projectors, as the projective measurements of state tomography
    """

    preparation_states: Tuple[QutritKet, ...] = NINE_STATES
    labels: Tuple[str, ...] = NINE_STATE_LABELS

    def __post_init__(self):
        states = tuple(self.preparation_states)
        labels = tuple(self.labels)

        if len(states) != DIM ** 2:
            raise ValidationError(f"Tomography needs {DIM ** 2} settings, got {len(states)}")
        if len(labels) != len(states):
            raise ValidationError("One label per preparation state is required")

        flat = np.stack([np.outer(s.amplitudes, s.amplitudes.conj()).reshape(-1) for s in states])
        if np.linalg.matrix_rank(flat) != DIM ** 2:
            raise ValidationError("Measurement projectors are not linearly independent, "
                                  "the settings are not informationally complete")

        object.__setattr__(self, "preparation_states", states)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def default(cls) -> TomographySettings:
        return DEFAULT_SETTINGS

    def __len__(self):
        return len(self.preparation_states)

    @cached_property
    def projectors(self) -> np.ndarray:
        # (9, 3, 3) stack of |phi_i><phi_i|
        arr = np.stack([np.outer(s.amplitudes, s.amplitudes.conj()) for s in self.preparation_states])
        arr.setflags(write=False)
        return arr

    def probabilities(self, rho: np.ndarray) -> np.ndarray:
        """Tr(rho Pi_i) for every projector"""
        return np.einsum('ab,iba->i', rho, self.projectors).real


DEFAULT_SETTINGS = TomographySettings()


@dataclass(frozen=True)
class CountRecord:
    """
    Photon counts accumulated for one measurement setting.

    `exact` records carry expected values instead of sampled counts (the infinite-exposure limit),
    in which case `counts` may be fractional and the record is never resampled
    """

    setting_index: int
    counts: float
    exposure: int
    exact: bool = field(default=False)

    def __post_init__(self):
        if self.counts < 0:
            raise ValidationError(f"Counts must be non-negative, got {self.counts}")
        if self.exposure < 1:
            raise ValidationError(f"Exposure must be at least 1 trial, got {self.exposure}")
        if not self.exact and float(self.counts) != int(self.counts):
            raise ValidationError(f"Sampled counts must be integers, got {self.counts}")

    @property
    def sort_key(self):
        return self.setting_index, self.exposure, self.counts


def aggregate_records(records: Iterable[CountRecord], n_settings: int = DIM ** 2) -> Tuple[np.ndarray, np.ndarray]:
    """
    Total counts and total exposure per setting.

    Raises:
        ReconstructionError: if a setting index is out of range or some setting has no record

    """
    counts = np.zeros(n_settings)
    exposures = np.zeros(n_settings)

    for record in records:
        if not 0 <= record.setting_index < n_settings:
            raise ReconstructionError(f"Setting index {record.setting_index} out of range [0, {n_settings})")

        counts[record.setting_index] += record.counts
        exposures[record.setting_index] += record.exposure

    missing = np.flatnonzero(exposures == 0)
    if len(missing) > 0:
        raise ReconstructionError(f"No records for settings {missing.tolist()}, all {n_settings} settings are needed")

    return counts, exposures


GroupedRecords = Mapping[str, Sequence[CountRecord]]


def records_to_frame(records: Union[Sequence[CountRecord], GroupedRecords],
                     group_by: Optional[str] = None) -> pd.DataFrame:
    """
    One row per record. With `group_by`, `records` maps a label (e.g. the input state) to its records
    and the label is written in a leading `group_by` column
    """
    if group_by is not None:
        return pd.concat([records_to_frame(group).assign(**{group_by: label})[[group_by, *RECORD_COLUMNS]]
                          for label, group in records.items()], ignore_index=True)

    return pd.DataFrame({
        "setting_index": [r.setting_index for r in records],
        "counts": [r.counts for r in records],
        "exposure": [r.exposure for r in records],
        "exact": [r.exact for r in records],
    }, columns=list(RECORD_COLUMNS))


def records_from_frame(df: pd.DataFrame) -> List[CountRecord]:
    missing_cols = {"setting_index", "counts", "exposure"} - set(df.columns)
    if missing_cols:
        raise ValidationError(f"Count records are missing columns {sorted(missing_cols)}")

    # without the exact column every record holds sampled counts
    exact_flags = df["exact"].astype(bool) if "exact" in df.columns else pd.Series(False, index=df.index)

    return [CountRecord(int(row.setting_index),
                        float(row.counts) if exact else int(row.counts),
                        int(row.exposure),
                        exact=bool(exact))
            for row, exact in zip(df.itertuples(index=False), exact_flags)]


def save_records_csv(records: Union[Sequence[CountRecord], GroupedRecords],
                     csv_path: str,
                     group_by: Optional[str] = None):
    records_to_frame(records, group_by).to_csv(csv_path, index=False, float_format="%.17g", lineterminator="\n")


def load_records_csv(csv_path: str,
                     group_by: Optional[str] = None) -> Union[List[CountRecord], Dict[str, List[CountRecord]]]:
    """
    Read records written by `save_records_csv`. With `group_by`, returns the records of each label of
    that column, in order of first appearance
    """
    try:
        df = pd.read_csv(csv_path)
    except pd.errors.EmptyDataError:
        raise ValidationError(f"No count records in {csv_path}") from None

    if group_by is None:
        return records_from_frame(df)

    if group_by not in df.columns:
        raise ValidationError(f"Count records have no column '{group_by}' to group by")

    return {str(label): records_from_frame(group) for label, group in df.groupby(group_by, sort=False)}
