from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import NamedTuple, List, Optional, Tuple

from src.exceptions import ValidationError
from src.qutrit.states import DensityMatrix, BASIS_LABELS

# spatial label of a channel whose spatial degree of freedom carries a qutrit rather than a mode index
QUTRIT_PAYLOAD = "Q"

_LABEL_RE = re.compile(r"^f(?P<f>\d+)t(?P<t>\d+)(?:s:(?P<s>\w+))?$")


def spatial_labels(ns: int) -> Tuple[str, ...]:
    """L, G, R names for up to three spatial modes, s1..sN beyond that"""
    if ns < 1:
        raise ValidationError(f"ns must be at least 1, got {ns}")

    if ns <= len(BASIS_LABELS):
        return BASIS_LABELS[:ns]

    return tuple(f"s{i}" for i in range(1, ns + 1))


class ModeId(NamedTuple):
    f: int
    t: int
    s: str = QUTRIT_PAYLOAD

    @property
    def label(self) -> str:
        base = f"f{self.f}t{self.t}"
        return base if self.s == QUTRIT_PAYLOAD else f"{base}s:{self.s}"

    def __str__(self):
        return self.label

    @classmethod
    def parse(cls, label: str) -> ModeId:
        match = _LABEL_RE.match(label.strip())
        if match is None:
            raise ValidationError(f"Invalid mode label {label!r}, expected e.g. 'f1t2' or 'f1t2s:L'")

        f, t = int(match["f"]), int(match["t"])
        if f < 1 or t < 1:
            raise ValidationError(f"Mode indices are 1-based, got {label!r}")

        return cls(f, t, match["s"] if match["s"] is not None else QUTRIT_PAYLOAD)

    def with_f(self, f: int) -> ModeId:
        return self._replace(f=f)

    def with_t(self, t: int) -> ModeId:
        return self._replace(t=t)

    def check_in_grid(self, nf: int, nt: int, ns: Optional[int] = None):
        if not 1 <= self.f <= nf:
            raise ValidationError(f"{self.label}: spectral index outside the grid (1..{nf})")
        if not 1 <= self.t <= nt:
            raise ValidationError(f"{self.label}: temporal index outside the grid (1..{nt})")
        if ns is not None and self.s != QUTRIT_PAYLOAD and self.s not in spatial_labels(ns):
            raise ValidationError(f"{self.label}: spatial label outside the grid {spatial_labels(ns)}")


def mode_grid(nf: int, nt: int, ns: int) -> List[ModeId]:
    """Every (f, t, s) address of the grid, f-major then t then s"""
    if min(nf, nt, ns) < 1:
        raise ValidationError(f"Every grid dimension must be at least 1, got ({nf}, {nt}, {ns})")

    labels = spatial_labels(ns)
    return [ModeId(f, t, s) for f in range(1, nf + 1) for t in range(1, nt + 1) for s in labels]


@dataclass(frozen=True, eq=False)
class ChannelPayload:
    """
    Content of one multiplexed channel: an optional spatial qutrit state (None for a classical
    marker pulse) and the mean photon number of the pulse.

    After a conversion, `source` is the input channel the payload came from, and split outputs carry
    the fraction of the input they received and the relative phase of their readout
    """

    mode: ModeId
    state: Optional[DensityMatrix] = None
    mean_photons: float = 1.0
    source: Optional[ModeId] = None
    split_ratio: float = 1.0
    relative_phase: Optional[float] = field(default=None)

    def __post_init__(self):
        if self.mean_photons < 0:
            raise ValidationError(f"{self.mode.label}: mean photon number must be non-negative")
        if self.state is not None and not isinstance(self.state, DensityMatrix):
            object.__setattr__(self, "state", DensityMatrix(self.state))
        if not 0 < self.split_ratio <= 1:
            raise ValidationError(f"{self.mode.label}: split ratio must be in (0, 1], got {self.split_ratio}")

    @property
    def origin(self) -> ModeId:
        return self.mode if self.source is None else self.source
