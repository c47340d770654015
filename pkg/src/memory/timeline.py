from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

from src.exceptions import ScheduleError, ValidationError

# control pulse transferring the excitation to the spin level fires this long before the echo
CONTROL_LEAD_US = 0.5

_TIME_TOL = 1e-9


@dataclass(frozen=True)
class StorageTimeline:
    """
    Event times (us) of one spin-wave storage: absorption, AFC echo, the two control pulses and the
    retrieval. The spin-wave storage time is the control pulse separation
    """

    t_in_us: float
    t_echo_us: float
    t_control_down_us: float
    t_control_up_us: float
    t_out_us: float

    def __post_init__(self):
        if not self.t_control_down_us < self.t_echo_us:
            raise ScheduleError(f"Control pulse at {self.t_control_down_us} us does not precede the AFC echo "
                                f"at {self.t_echo_us} us")
        if self.t_control_down_us < self.t_in_us:
            raise ScheduleError(f"Control pulse at {self.t_control_down_us} us precedes the absorption "
                                f"at {self.t_in_us} us")
        if self.t_control_up_us < self.t_control_down_us:
            raise ScheduleError("Read-out control pulse precedes the write control pulse")
        if abs(self.t_out_us - (self.t_echo_us + self.t_spin_us)) > _TIME_TOL:
            raise ScheduleError(f"Retrieval at {self.t_out_us} us is inconsistent with echo time "
                                f"{self.t_echo_us} us and spin storage {self.t_spin_us} us")

    @property
    def afc_delay_us(self) -> float:
        return self.t_echo_us - self.t_in_us

    @property
    def t_spin_us(self) -> float:
        return self.t_control_up_us - self.t_control_down_us

    @property
    def total_storage_us(self) -> float:
        return self.t_out_us - self.t_in_us

    def output_window(self, width_us: float) -> Tuple[float, float]:
        return self.t_out_us - width_us / 2, self.t_out_us + width_us / 2


def storage_timeline(delta_hz: float, t_spin_us: float, t_in_us: float = 0.0,
                     control_lead_us: float = CONTROL_LEAD_US) -> StorageTimeline:
    """
    Timeline of a storage with AFC delay 1/delta followed by `t_spin_us` in the spin level.

    t_spin = 0 is a plain AFC echo: the two control pulses coincide and the photon leaves at 1/delta

    Raises:
        ValidationError: on non-positive delta or negative spin time
        ScheduleError: if the control pulses can't be placed between absorption and echo

    """
    if delta_hz <= 0:
        raise ValidationError(f"Tooth spacing must be positive, got {delta_hz}")
    if t_spin_us < 0:
        raise ValidationError(f"Spin-wave storage time must be non-negative, got {t_spin_us}")

    t_echo = t_in_us + 1e6 / delta_hz
    t_down = t_echo - control_lead_us

    return StorageTimeline(t_in_us=t_in_us,
                           t_echo_us=t_echo,
                           t_control_down_us=t_down,
                           t_control_up_us=t_down + t_spin_us,
                           t_out_us=t_echo + t_spin_us)
