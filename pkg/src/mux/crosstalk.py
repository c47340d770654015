from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np
import pandas as pd

from src.exceptions import ValidationError
from src.memory.detection import MemoryCalibration
from src.mux.modes import ModeId, ChannelPayload
from src.utils import make_rng, SeedLike


@dataclass(frozen=True)
class LeakageModel:
    """
    Fraction of a channel's signal that shows up in another channel, one scalar per degree of
    freedom. A pair of modes differing in several degrees of freedom leaks by the largest of them
    """

    spectral: float = 0.0
    temporal: float = 0.0
    spatial: float = 0.0

    def __post_init__(self):
        for name in ("spectral", "temporal", "spatial"):
            value = getattr(self, name)
            if not 0 <= value < 1:
                raise ValidationError(f"{name} leakage must be in [0, 1), got {value}")

    @classmethod
    def uniform(cls, leak: float) -> LeakageModel:
        return cls(leak, leak, leak)

    def between(self, source: ModeId, target: ModeId) -> float:
        leaks = []
        if source.f != target.f:
            leaks.append(self.spectral)
        if source.t != target.t:
            leaks.append(self.temporal)
        if source.s != target.s:
            leaks.append(self.spatial)

        return max(leaks) if leaks else 0.0


@dataclass(frozen=True, eq=False)
class CrosstalkMatrix:
    """Counts recorded in each output mode (columns) when only one input mode (rows) is stored"""

    modes: Tuple[ModeId, ...]
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts)
        n = len(self.modes)

        if counts.shape != (n, n):
            raise ValidationError(f"Crosstalk matrix must be {n}x{n} for {n} modes, got shape {counts.shape}")
        if np.any(counts < 0):
            raise ValidationError("Counts must be non-negative")

        counts = counts.astype(np.int64)
        counts.setflags(write=False)
        object.__setattr__(self, "modes", tuple(self.modes))
        object.__setattr__(self, "counts", counts)

    def __len__(self):
        return len(self.modes)

    def to_frame(self) -> pd.DataFrame:
        labels = [mode.label for mode in self.modes]
        df = pd.DataFrame(self.counts, index=labels, columns=labels)
        df.index.name = "input_mode"
        return df

    @classmethod
    def from_frame(cls, df: pd.DataFrame) -> CrosstalkMatrix:
        modes = tuple(ModeId.parse(label) for label in df.index)
        return cls(modes, df.to_numpy())


def run_multiplexed(inputs: Sequence[ChannelPayload],
                    cal: MemoryCalibration,
                    leak: Union[float, LeakageModel],
                    trials: int,
                    seed: SeedLike = 42) -> CrosstalkMatrix:
    """
    Crosstalk matrix of a multiplexed storage: each input mode is stored alone and every output mode
    is read out.

    Diagonal counts are Poisson with mean trials * mu * eta_SW(f) * eta_detect, off-diagonal counts
    Poisson with mean trials * (noise_rate + leak * mu * eta_SW(f) * eta_detect), f being the comb of
    the input row

    Raises:
        ValidationError: on duplicate input modes or leakage outside [0, 1)

    """
    if trials < 1:
        raise ValidationError(f"trials must be at least 1, got {trials}")

    modes = [payload.mode for payload in inputs]
    duplicates = sorted({mode.label for mode in modes if modes.count(mode) > 1})
    if duplicates:
        raise ValidationError(f"Duplicate input modes: {duplicates}")

    leakage = leak if isinstance(leak, LeakageModel) else LeakageModel.uniform(leak)

    means = np.empty((len(modes), len(modes)))
    for i, payload in enumerate(inputs):
        signal = trials * cal.signal_probability(mu=payload.mean_photons, f=payload.mode.f)

        for j, target in enumerate(modes):
            if i == j:
                means[i, j] = signal
            else:
                means[i, j] = trials * cal.noise_rate + leakage.between(payload.mode, target) * signal

    rng = make_rng(seed)
    return CrosstalkMatrix(tuple(modes), rng.poisson(means))


def crosstalk_min(m: CrosstalkMatrix) -> float:
    """
    Smallest ratio, over input rows, between the diagonal count and the largest off-diagonal count.
    math.inf when no row has a positive off-diagonal count

    Raises:
        ValidationError: on an empty matrix

    """
    if len(m) == 0:
        raise ValidationError("Empty crosstalk matrix")

    counts = m.counts
    ratios = []
    for i in range(len(m)):
        diagonal = counts[i, i]
        off_diagonal = np.delete(counts[i], i)
        max_off = off_diagonal.max() if len(off_diagonal) > 0 else 0

        if diagonal == 0:
            ratios.append(0.0)
        elif max_off == 0:
            ratios.append(math.inf)
        else:
            ratios.append(diagonal / max_off)

    return float(min(ratios))
