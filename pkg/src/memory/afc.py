from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple, List

import numpy as np

from src.exceptions import ValidationError

# transmission window of the filter crystal around each spectral channel
FILTER_WINDOW_HZ = 1.84e6

# samples per tooth period used by the echo model when no resolution is given
SAMPLES_PER_PERIOD = 20


def filter_transmits(offset_hz: float, window_hz: float = FILTER_WINDOW_HZ) -> bool:
    """True if light detuned by `offset_hz` from the filter center falls inside the transmission window"""
    return abs(offset_hz) <= window_hz / 2


class ToothShape(ABC):
    """Absorption profile of a single comb tooth, 1 at the tooth center"""

    @abstractmethod
    def __call__(self, offset_hz: np.ndarray, width_hz: float) -> np.ndarray:
        raise NotImplementedError

    @abstractmethod
    def __str__(self):
        raise NotImplementedError


class SquareTooth(ToothShape):

    def __call__(self, offset_hz: np.ndarray, width_hz: float) -> np.ndarray:
        return (np.abs(offset_hz) < width_hz / 2).astype(float)

    def __str__(self):
        return "square"


class GaussianTooth(ToothShape):
    """Gaussian tooth with full width at half maximum equal to the tooth width"""

    def __call__(self, offset_hz: np.ndarray, width_hz: float) -> np.ndarray:
        offset_hz = np.asarray(offset_hz, dtype=float)
        if width_hz == 0:
            return np.zeros_like(offset_hz)

        return np.exp(-4 * np.log(2) * (offset_hz / width_hz) ** 2)

    def __str__(self):
        return "gaussian"


TOOTH_SHAPES = {
    "square": SquareTooth(),
    "gaussian": GaussianTooth(),
}


def tooth_shape_from_name(name: str) -> ToothShape:
    try:
        return TOOTH_SHAPES[name]
    except KeyError:
        raise ValidationError(f"Unknown tooth shape {name!r}, valid shapes are {list(TOOTH_SHAPES)}") from None


@dataclass(frozen=True)
class AfcComb:
    """
    Atomic frequency comb: teeth spaced by `delta_hz` over a band `bandwidth_hz` wide, centered at
    `center_offset_hz` from the signal reference.

    `efficiency_override` pins the echo efficiency to a measured value (calibration mode), in which
    case the spectral parameters only describe the structure and don't enter the efficiency
    """

    delta_hz: float = 200e3
    bandwidth_hz: float = 2e6
    center_offset_hz: float = 0.0
    finesse: float = 4.0
    peak_od: float = 4.0
    background_od: float = 0.2
    tooth_shape: str = "square"
    efficiency_override: Optional[float] = field(default=None)

    def __post_init__(self):
        if self.delta_hz <= 0:
            raise ValidationError(f"Tooth spacing must be positive, got {self.delta_hz}")
        if self.bandwidth_hz < self.delta_hz:
            raise ValidationError(f"Comb bandwidth ({self.bandwidth_hz}) can't be smaller than the tooth "
                                  f"spacing ({self.delta_hz})")
        if not self.finesse > 1:
            raise ValidationError(f"Finesse must be greater than 1, got {self.finesse}")
        if self.peak_od < 0 or self.background_od < 0:
            raise ValidationError("Optical depths must be non-negative")
        if self.efficiency_override is not None and not 0 <= self.efficiency_override <= 1:
            raise ValidationError(f"Efficiency override must be in [0, 1], got {self.efficiency_override}")

        tooth_shape_from_name(self.tooth_shape)

    @property
    def tooth_width_hz(self) -> float:
        return self.delta_hz / self.finesse

    @property
    def storage_time_us(self) -> float:
        return 1e6 / self.delta_hz

    @property
    def n_teeth(self) -> int:
        return temporal_capacity(self)

    def optical_depth(self, detuning_hz: np.ndarray) -> np.ndarray:
        """OD of the comb at the given detunings, background_od outside the teeth and 0 outside the comb band"""
        detuning_hz = np.asarray(detuning_hz, dtype=float)
        shape = tooth_shape_from_name(self.tooth_shape)

        rel = detuning_hz - (self.center_offset_hz - self.bandwidth_hz / 2)
        inside = (rel >= 0) & (rel < self.n_teeth * self.delta_hz)

        # distance from the nearest tooth center, teeth at (k + 1/2) delta from the lower band edge
        offset = np.mod(rel, self.delta_hz) - self.delta_hz / 2
        modulation = shape(offset, self.tooth_width_hz)

        od = self.background_od + (self.peak_od - self.background_od) * modulation
        return np.where(inside, od, 0.0)

    def sample(self, resolution_hz: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
        """
        Detunings and OD sampled over the comb band at the midpoints of `resolution_hz` wide cells,
        aligned with the lower band edge
        """
        resolution_hz = self.delta_hz / SAMPLES_PER_PERIOD if resolution_hz is None else resolution_hz
        if resolution_hz <= 0:
            raise ValidationError(f"Resolution must be positive, got {resolution_hz}")

        n_samples = int(round(self.n_teeth * self.delta_hz / resolution_hz))
        detuning = (self.center_offset_hz - self.bandwidth_hz / 2) + (np.arange(n_samples) + 0.5) * resolution_hz
        return detuning, self.optical_depth(detuning)


@dataclass(frozen=True)
class PreparationParameters:
    """
    Hole-burning preparation: each comb sits in its own transparent pit of width `pit_width_hz`,
    the inhomogeneous line outside the pits has depth `line_od`
    """

    combs: Tuple[AfcComb, ...] = (AfcComb(),)
    pit_width_hz: float = 16e6
    line_od: float = 6.0
    resolution_hz: float = 10e3

    def __post_init__(self):
        if len(self.combs) == 0:
            raise ValidationError("At least one comb is needed")
        if self.resolution_hz <= 0:
            raise ValidationError(f"Resolution must be positive, got {self.resolution_hz}")
        if self.line_od < 0:
            raise ValidationError("Optical depths must be non-negative")

        object.__setattr__(self, "combs", tuple(self.combs))

    @classmethod
    def double_comb(cls, separation_hz: float = 80e6, **kwargs) -> PreparationParameters:
        comb_kwargs = {k: kwargs.pop(k) for k in list(kwargs) if k in AfcComb.__dataclass_fields__}

        combs = (AfcComb(center_offset_hz=0.0, **comb_kwargs),
                 AfcComb(center_offset_hz=separation_hz, **comb_kwargs))
        return cls(combs=combs, **kwargs)


@dataclass(frozen=True, eq=False)
class SpectralProfile:
    detuning_hz: np.ndarray
    optical_depth: np.ndarray
    combs: Tuple[AfcComb, ...]
    resolution_hz: float

    def comb_mask(self, comb_index: int) -> np.ndarray:
        comb = self.combs[comb_index]
        rel = self.detuning_hz - (comb.center_offset_hz - comb.bandwidth_hz / 2)
        return (rel >= 0) & (rel < comb.n_teeth * comb.delta_hz)

    def comb_centers(self) -> List[float]:
        return [comb.center_offset_hz for comb in self.combs]

    def teeth_per_comb(self) -> List[int]:
        """Number of separate absorbing features above half maximum on the sampled profile of each comb"""
        teeth = []
        for i, comb in enumerate(self.combs):
            half_max = (comb.peak_od + comb.background_od) / 2
            above = (self.optical_depth > half_max) & self.comb_mask(i)

            # rising edges of the above-background indicator
            teeth.append(int(np.count_nonzero(np.diff(above.astype(int), prepend=0) == 1)))

        return teeth

    def tooth_area(self) -> List[float]:
        """Integral of the OD above background over each comb band (OD x Hz)"""
        areas = []
        for i, comb in enumerate(self.combs):
            excess = np.clip(self.optical_depth[self.comb_mask(i)] - comb.background_od, 0, None)
            areas.append(float(excess.sum() * self.resolution_hz))

        return areas


def build_spectral_structure(prep: PreparationParameters) -> SpectralProfile:
    """
    Sampled absorption profile produced by the preparation: line_od everywhere except inside the
    transparent pits, each pit holding one comb

    Raises:
        ValidationError: if the resolution is coarser than delta/20 or a comb is wider than its pit

    """
    for comb in prep.combs:
        if prep.resolution_hz > comb.delta_hz / SAMPLES_PER_PERIOD + 1e-9:
            raise ValidationError(f"Resolution {prep.resolution_hz} Hz is coarser than delta/{SAMPLES_PER_PERIOD} "
                                  f"({comb.delta_hz / SAMPLES_PER_PERIOD} Hz)")
        if comb.bandwidth_hz > prep.pit_width_hz:
            raise ValidationError(f"Comb bandwidth {comb.bandwidth_hz} Hz is wider than the transparent pit "
                                  f"({prep.pit_width_hz} Hz)")

    centers = [comb.center_offset_hz for comb in prep.combs]
    margin = prep.pit_width_hz / 4
    start = min(centers) - prep.pit_width_hz / 2 - margin
    stop = max(centers) + prep.pit_width_hz / 2 + margin

    n_samples = int(round((stop - start) / prep.resolution_hz))
    detuning = start + (np.arange(n_samples) + 0.5) * prep.resolution_hz

    od = np.full(n_samples, prep.line_od)
    for comb in prep.combs:
        in_pit = np.abs(detuning - comb.center_offset_hz) < prep.pit_width_hz / 2
        od[in_pit] = 0.0

    for comb in prep.combs:
        comb_od = comb.optical_depth(detuning)
        rel = detuning - (comb.center_offset_hz - comb.bandwidth_hz / 2)
        in_comb = (rel >= 0) & (rel < comb.n_teeth * comb.delta_hz)
        od[in_comb] = comb_od[in_comb]

    return SpectralProfile(detuning_hz=detuning, optical_depth=od, combs=prep.combs,
                           resolution_hz=prep.resolution_hz)


def echo_amplitude(comb: AfcComb, at_time_us: float, resolution_hz: Optional[float] = None) -> complex:
    """
    First-order echo amplitude: Fourier component at delay `at_time_us` of the field absorption
    response 1 - exp(-d/2) sampled over the comb band, with its mean removed
    """
    detuning, od = comb.sample(resolution_hz)
    response = 1 - np.exp(-od / 2)
    response = response - response.mean()

    phase = np.exp(-2j * np.pi * detuning * at_time_us * 1e-6)
    return complex(np.mean(response * phase))


def echo_efficiency(comb: AfcComb, at_time_us: float, resolution_hz: Optional[float] = None) -> float:
    """
    Echo efficiency |2 A(t)|^2 exp(-background_od), A(t) being `echo_amplitude`.

    With an efficiency override the configured value is returned as is
    """
    if comb.efficiency_override is not None:
        return comb.efficiency_override

    amplitude = echo_amplitude(comb, at_time_us, resolution_hz)
    efficiency = abs(2 * amplitude) ** 2 * math.exp(-comb.background_od)
    return float(min(max(efficiency, 0.0), 1.0))


def scan_echo_delay(comb: AfcComb, step_us: Optional[float] = None,
                    resolution_hz: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Efficiency over delays in the open interval (0, 2/delta)"""
    period_us = comb.storage_time_us
    step_us = period_us / 40 if step_us is None else step_us

    n_steps = int(math.floor(2 * period_us / step_us - 1e-9))
    delays = np.arange(1, n_steps + 1) * step_us

    # the scan is done on the spectral model even when an override is set
    spectral = replace(comb, efficiency_override=None)
    efficiencies = np.array([echo_efficiency(spectral, t, resolution_hz) for t in delays])
    return delays, efficiencies


def temporal_capacity(comb: AfcComb) -> int:
    """Number of temporal modes the comb can hold, floor(bandwidth / delta)"""
    return int(math.floor(comb.bandwidth_hz / comb.delta_hz + 1e-9))


def spectral_capacity(total_bandwidth_hz: float, channel_spacing_hz: float) -> int:
    if channel_spacing_hz <= 0:
        raise ValidationError(f"Channel spacing must be positive, got {channel_spacing_hz}")

    return int(math.floor(total_bandwidth_hz / channel_spacing_hz + 1e-9))


def multimode_capacity(nf: int, nt: int, ns: int) -> int:
    if min(nf, nt, ns) < 1:
        raise ValidationError(f"Every dimension must be at least 1, got ({nf}, {nt}, {ns})")

    return nf * nt * ns
