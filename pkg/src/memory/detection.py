from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Tuple, Sequence, Optional

import numpy as np
import pandas as pd
import scipy.stats

from src.exceptions import ValidationError
from src.memory.timeline import StorageTimeline
from src.utils import make_rng, SeedLike

BIN_WIDTH_US = 0.1
HISTOGRAM_END_US = 20.0


@dataclass(frozen=True)
class MemoryCalibration:
    """
    Efficiency and noise figures of the memory, per trial (one input pulse).

    `eta_sw_per_comb` optionally overrides `eta_sw` for each spectral channel f (1-based)
    """

    eta_sw: float = 0.0551
    mu: float = 1.12
    noise_rate: float = 3.9866e-4
    detection_window_us: float = 1.0
    eta_detect: float = 0.25
    eta_sw_per_comb: Tuple[float, ...] = field(default=())

    def __post_init__(self):
        for name in ("eta_sw", "noise_rate", "eta_detect"):
            value = getattr(self, name)
            if not 0 <= value <= 1:
                raise ValidationError(f"{name} must be in [0, 1], got {value}")

        for f, value in enumerate(self.eta_sw_per_comb, start=1):
            if not 0 <= value <= 1:
                raise ValidationError(f"eta_sw of comb f{f} must be in [0, 1], got {value}")

        if self.mu < 0:
            raise ValidationError(f"mu must be non-negative, got {self.mu}")
        if self.detection_window_us <= 0:
            raise ValidationError(f"Detection window must be positive, got {self.detection_window_us}")

        object.__setattr__(self, "eta_sw_per_comb", tuple(self.eta_sw_per_comb))

    def eta_sw_for(self, f: int) -> float:
        if self.eta_sw_per_comb:
            if not 1 <= f <= len(self.eta_sw_per_comb):
                raise ValidationError(f"No efficiency configured for comb f{f}")
            return self.eta_sw_per_comb[f - 1]

        return self.eta_sw

    def signal_probability(self, mu: Optional[float] = None, f: Optional[int] = None) -> float:
        """Probability of detecting the stored photon in its output window in one trial"""
        mu = self.mu if mu is None else mu
        eta_sw = self.eta_sw if f is None else self.eta_sw_for(f)
        return mu * eta_sw * self.eta_detect

    def relative_noise(self, mu: Optional[float] = None, f: Optional[int] = None) -> float:
        """Noise floor per window as a fraction of the signal"""
        signal = self.signal_probability(mu, f)
        return math.inf if signal == 0 else self.noise_rate / signal


@dataclass(frozen=True, eq=False)
class CountHistogram:
    bin_edges: np.ndarray
    counts: np.ndarray
    trials: int

    def __post_init__(self):
        bin_edges = np.asarray(self.bin_edges, dtype=float)
        counts = np.asarray(self.counts)

        if bin_edges.ndim != 1 or len(bin_edges) < 2:
            raise ValidationError("At least two bin edges are needed")
        if np.any(np.diff(bin_edges) <= 0):
            raise ValidationError("Bin edges must be strictly increasing")
        if counts.shape != (len(bin_edges) - 1,):
            raise ValidationError(f"Expected {len(bin_edges) - 1} bin counts, got shape {counts.shape}")
        if np.any(counts < 0):
            raise ValidationError("Counts must be non-negative")

        bin_edges.setflags(write=False)
        counts = counts.astype(np.int64)
        counts.setflags(write=False)
        object.__setattr__(self, "bin_edges", bin_edges)
        object.__setattr__(self, "counts", counts)

    @classmethod
    def empty(cls, bin_width_us: float = BIN_WIDTH_US, end_us: float = HISTOGRAM_END_US) -> CountHistogram:
        edges = histogram_edges(bin_width_us, end_us)
        return cls(edges, np.zeros(len(edges) - 1, dtype=np.int64), 0)

    @property
    def bin_centers(self) -> np.ndarray:
        return (self.bin_edges[:-1] + self.bin_edges[1:]) / 2

    def window_mask(self, window: Tuple[float, float]) -> np.ndarray:
        """Bins whose center lies in [start, end)"""
        start, end = window
        if not end > start:
            raise ValidationError(f"Window [{start}, {end}) has zero length")
        if start < self.bin_edges[0] or end > self.bin_edges[-1]:
            raise ValidationError(f"Window [{start}, {end}) is outside the histogram range "
                                  f"[{self.bin_edges[0]}, {self.bin_edges[-1]}]")

        centers = self.bin_centers
        return (centers >= start) & (centers < end)

    def window_counts(self, window: Tuple[float, float]) -> int:
        return int(self.counts[self.window_mask(window)].sum())

    def __add__(self, other: CountHistogram) -> CountHistogram:
        if not isinstance(other, CountHistogram):
            return NotImplemented
        if not np.array_equal(self.bin_edges, other.bin_edges):
            raise ValidationError("Cannot merge histograms with different binning")

        return CountHistogram(self.bin_edges, self.counts + other.counts, self.trials + other.trials)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "bin_start_us": self.bin_edges[:-1],
            "bin_end_us": self.bin_edges[1:],
            "counts": self.counts,
        })

    @classmethod
    def from_frame(cls, df: pd.DataFrame, trials: int) -> CountHistogram:
        edges = np.append(df["bin_start_us"].to_numpy(), df["bin_end_us"].to_numpy()[-1])
        return cls(edges, df["counts"].to_numpy(), trials)


def histogram_edges(bin_width_us: float = BIN_WIDTH_US, end_us: float = HISTOGRAM_END_US) -> np.ndarray:
    if bin_width_us <= 0 or end_us <= 0:
        raise ValidationError("Bin width and histogram end must be positive")

    n_bins = int(round(end_us / bin_width_us))
    return np.linspace(0, n_bins * bin_width_us, n_bins + 1)


def pulse_profile(edges: np.ndarray, center_us: float, window_us: float) -> np.ndarray:
    """
    Fraction of a retrieved pulse falling in each bin: Gaussian with sigma = window/6 restricted to the
    bins whose center is inside the detection window, normalized to 1 over the window
    """
    centers = (edges[:-1] + edges[1:]) / 2
    in_window = (centers >= center_us - window_us / 2) & (centers < center_us + window_us / 2)

    weights = np.where(in_window, scipy.stats.norm.pdf(centers, loc=center_us, scale=window_us / 6), 0.0)
    total = weights.sum()
    if total == 0:
        raise ValidationError(f"Detection window around {center_us} us contains no histogram bin")

    return weights / total


def expected_counts(cal: MemoryCalibration,
                    retrievals: Sequence[Tuple[float, float]],
                    trials: int,
                    bin_width_us: float = BIN_WIDTH_US,
                    end_us: float = HISTOGRAM_END_US) -> Tuple[np.ndarray, np.ndarray]:
    """
    Bin edges and mean counts per bin for a set of retrievals, each given as (t_out_us, detection
    probability per trial), on top of the homogeneous noise floor
    """
    edges = histogram_edges(bin_width_us, end_us)
    widths = np.diff(edges)

    means = trials * cal.noise_rate * widths / cal.detection_window_us
    for t_out, probability in retrievals:
        means = means + trials * probability * pulse_profile(edges, t_out, cal.detection_window_us)

    return edges, means


def simulate_detection(cal: MemoryCalibration,
                       timeline: StorageTimeline,
                       trials: int,
                       seed: SeedLike = 42,
                       bin_width_us: float = BIN_WIDTH_US,
                       end_us: float = HISTOGRAM_END_US) -> CountHistogram:
    """
    Photon-count histogram of `trials` storage attempts.

    Signal counts in the output window are Poisson with mean trials * mu * eta_SW * eta_detect,
    noise counts are Poisson with mean trials * noise_rate per detection window, spread uniformly
    over the histogram

    """
    if trials < 1:
        raise ValidationError(f"trials must be at least 1, got {trials}")

    edges, means = expected_counts(cal, [(timeline.t_out_us, cal.signal_probability())], trials,
                                   bin_width_us, end_us)

    rng = make_rng(seed)
    return CountHistogram(edges, rng.poisson(means), trials)


def snr(hist: CountHistogram, signal_window: Tuple[float, float], noise_window: Tuple[float, float]) -> float:
    """
    Counts in the signal window divided by counts in an equally long noise window, math.inf when
    the noise window is empty

    Raises:
        ValidationError: on zero-length windows, windows outside the histogram, or windows covering
            a different number of bins

    """
    signal_mask = hist.window_mask(signal_window)
    noise_mask = hist.window_mask(noise_window)

    if signal_mask.sum() != noise_mask.sum():
        raise ValidationError(f"Signal and noise windows must have equal duration, they cover "
                              f"{signal_mask.sum()} and {noise_mask.sum()} bins")

    signal_counts = hist.counts[signal_mask].sum()
    noise_counts = hist.counts[noise_mask].sum()

    if noise_counts == 0:
        return math.inf

    return float(signal_counts / noise_counts)
