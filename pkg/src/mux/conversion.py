from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union, Iterable

from src import ScenarioConfig
from src.exceptions import ValidationError, ScheduleError, CollisionError, TimingError
from src.memory.afc import filter_transmits
from src.mux.modes import ModeId

_TIME_TOL = 1e-9


@dataclass(frozen=True)
class Retime:
    """Retrieve the photon at temporal slot `target_t` by moving the read-out control pulse"""
    target_t: int
    merge: bool = False

    def __str__(self):
        return f"retime t{self.target_t}" + (" merge" if self.merge else "")


@dataclass(frozen=True)
class FrequencyShift:
    """Shift the retrieved photon onto spectral channel `target_f` with the gate AOM"""
    target_f: int
    merge: bool = False

    def __str__(self):
        return f"shift f{self.target_f}" + (" merge" if self.merge else "")


@dataclass(frozen=True)
class Split:
    """
    Partial read-outs at several temporal slots. `ratios` are the fractions of the stored excitation
    sent to each target; a single ratio r with two targets means (r, 1 - r), no ratio means an even
    split. `phase` is the relative phase of the second read-out, kept as metadata
    """
    targets: Tuple[int, ...]
    ratios: Tuple[float, ...] = ()
    phase: float = 0.0

    def __post_init__(self):
        targets = tuple(int(t) for t in self.targets)
        ratios = tuple(float(r) for r in self.ratios)

        if len(targets) < 2:
            raise ValidationError("A split needs at least two target slots")
        if len(set(targets)) != len(targets):
            raise ValidationError(f"Split targets must be distinct, got {targets}")

        if len(ratios) == 0:
            ratios = tuple(1 / len(targets) for _ in targets)
        elif len(ratios) == 1 and len(targets) == 2:
            ratios = (ratios[0], 1 - ratios[0])

        if len(ratios) != len(targets):
            raise ValidationError(f"Got {len(ratios)} split ratios for {len(targets)} targets")
        if any(not 0 < r < 1 for r in ratios):
            raise ValidationError(f"Split ratios must be in (0, 1), got {ratios}")
        if sum(ratios) > 1 + 1e-12:
            raise ValidationError(f"Split ratios sum to {sum(ratios)}, more than 1")
        if not math.isfinite(self.phase):
            raise ValidationError(f"Split phase must be finite, got {self.phase}")

        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "ratios", ratios)

    def __str__(self):
        targets = " ".join(f"t{t}" for t in self.targets)
        ratios = " ".join(f"{r:g}" for r in self.ratios)
        return f"split {targets} {ratios} {self.phase:g}"


@dataclass(frozen=True)
class Drop:
    """Keep the gate closed: the photon is retrieved but filtered out"""

    def __str__(self):
        return "drop"


ConversionOp = Union[Retime, FrequencyShift, Split, Drop]
OpsLike = Union[ConversionOp, Sequence[ConversionOp]]


@dataclass(frozen=True)
class TimingParameters:
    """
    Timing of the converter. Input slot i is absorbed at (i - 1) * pitch; output slot j is read out at
    1/delta + t_spin + (j - 1) * pitch, so that slot 1 stored without retiming spends `t_spin_us` in
    the spin level
    """

    delta_hz: float = 200e3
    t_spin_us: float = 7.68
    slot_pitch_us: float = 2.0
    min_spin_time_us: float = 1.0
    control_lead_us: float = 0.5
    gate_width_us: float = 1.0
    nf: int = 2
    nt: int = 2
    spectral_spacing_hz: float = 80e6

    def __post_init__(self):
        if self.delta_hz <= 0:
            raise ValidationError(f"delta_hz must be positive, got {self.delta_hz}")
        if self.slot_pitch_us <= 0 or self.gate_width_us <= 0 or self.spectral_spacing_hz <= 0:
            raise ValidationError("Slot pitch, gate width and spectral spacing must be positive")
        if self.t_spin_us < 0 or self.min_spin_time_us < 0 or self.control_lead_us < 0:
            raise ValidationError("Spin times and control lead must be non-negative")
        if self.nf < 1 or self.nt < 1:
            raise ValidationError(f"Grid must have at least one slot per axis, got nf={self.nf}, nt={self.nt}")

    @classmethod
    def from_config(cls, config: ScenarioConfig) -> TimingParameters:
        return cls(delta_hz=config.memory.delta_hz,
                   t_spin_us=config.memory.t_spin_us,
                   slot_pitch_us=config.grid.slot_pitch_us,
                   min_spin_time_us=config.grid.min_spin_time_us,
                   control_lead_us=config.grid.control_lead_us,
                   gate_width_us=config.calibration.detection_window_us,
                   nf=config.grid.nf,
                   nt=config.grid.nt,
                   spectral_spacing_hz=config.grid.spectral_spacing_hz)

    @property
    def afc_delay_us(self) -> float:
        return 1e6 / self.delta_hz

    def input_time(self, t: int) -> float:
        return (t - 1) * self.slot_pitch_us

    def output_time(self, t: int) -> float:
        return self.afc_delay_us + self.t_spin_us + (t - 1) * self.slot_pitch_us


@dataclass(frozen=True)
class ChannelEntry:
    """
    One read-out of the pulse timeline. A split input gives one entry per partial read-out, sharing
    the write control pulse; a dropped input gives one entry with no output and no gate
    """

    source: ModeId
    output: Optional[ModeId]
    absorption_us: float
    echo_us: float
    control_down_us: float
    control_up_us: float
    t_out_us: float
    gate: Optional[Tuple[float, float]]
    shift_hz: float = 0.0
    weight: float = 1.0
    phase: Optional[float] = None
    merged: bool = False
    lines: Tuple[int, ...] = field(default=())

    @property
    def dropped(self) -> bool:
        return self.output is None

    @property
    def t_spin_us(self) -> float:
        return self.control_up_us - self.control_down_us


def _overlap(a: Tuple[float, float], b: Tuple[float, float]) -> bool:
    return a[0] < b[1] and b[0] < a[1]


@dataclass(frozen=True, eq=False)
class PulseTimeline:
    """
    Validated control sequence of the memory: absorption, control pulse pair, gate window and shifter
    setting of every read-out. Construction fails if any invariant is violated
    """

    entries: Tuple[ChannelEntry, ...]
    timing: TimingParameters = field(default_factory=TimingParameters)

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        self.check_invariants()

    def check_invariants(self):
        """
        Raises:
            TimingError: a control pulse does not precede its echo or leaves too little spin storage
            CollisionError: two gate windows on the same output frequency overlap without a merge
            ScheduleError: inconsistent retrieval times, shifter settings or grid addresses

        """
        timing = self.timing

        for entry in self.entries:
            label = entry.source.label

            if not entry.control_down_us < entry.echo_us:
                raise TimingError(f"{label}: control pulse at {entry.control_down_us:.2f} us does not precede "
                                  f"the AFC echo at {entry.echo_us:.2f} us", entry.lines)
            if entry.control_down_us < entry.absorption_us - _TIME_TOL:
                raise TimingError(f"{label}: control pulse precedes the absorption", entry.lines)
            if entry.t_spin_us < timing.min_spin_time_us - _TIME_TOL:
                raise TimingError(f"{label}: read-out at {entry.t_out_us:.2f} us leaves {entry.t_spin_us:.2f} us "
                                  f"in the spin level, at least {timing.min_spin_time_us} us are needed",
                                  entry.lines)
            if abs(entry.t_out_us - (entry.echo_us + entry.t_spin_us)) > _TIME_TOL:
                raise ScheduleError(f"{label}: retrieval time inconsistent with the control pulses", entry.lines)
            if abs(entry.echo_us - entry.absorption_us - timing.afc_delay_us) > _TIME_TOL:
                raise ScheduleError(f"{label}: echo is not 1/delta after the absorption", entry.lines)

            if entry.dropped:
                continue

            try:
                entry.source.check_in_grid(timing.nf, timing.nt)
                entry.output.check_in_grid(timing.nf, timing.nt)
            except ValidationError as e:
                raise ScheduleError(str(e), entry.lines) from None

            steps = entry.shift_hz / timing.spectral_spacing_hz
            if abs(steps - round(steps)) > 1e-9 or entry.source.f + round(steps) != entry.output.f:
                raise ScheduleError(f"{label}: shifter setting {entry.shift_hz / 1e6:g} MHz does not map "
                                    f"f{entry.source.f} onto f{entry.output.f}", entry.lines)

            residual_hz = entry.shift_hz - (entry.output.f - entry.source.f) * timing.spectral_spacing_hz
            if not filter_transmits(residual_hz):
                raise ScheduleError(f"{label}: shifted photon falls outside the filter window", entry.lines)

        open_entries = [entry for entry in self.entries if not entry.dropped]
        for i, a in enumerate(open_entries):
            for b in open_entries[i + 1:]:
                if a.output.f != b.output.f or not _overlap(a.gate, b.gate):
                    continue

                lines = sorted(set(a.lines) | set(b.lines))
                if a.output != b.output:
                    raise CollisionError(f"gate windows of {a.source.label} -> {a.output.label} and "
                                         f"{b.source.label} -> {b.output.label} overlap", lines)
                if not (a.merged or b.merged):
                    raise CollisionError(f"{a.source.label} and {b.source.label} are both assigned to "
                                         f"{a.output.label} without merge", lines)

    @property
    def sources(self) -> List[ModeId]:
        return sorted({entry.source for entry in self.entries})

    @property
    def outputs(self) -> List[ModeId]:
        return sorted({entry.output for entry in self.entries if not entry.dropped})

    def entries_for(self, source: ModeId) -> List[ChannelEntry]:
        return [entry for entry in self.entries if entry.source == source]

    def summary(self) -> str:
        lines = [f"valid: {len(self.sources)} channels, {len(self.outputs)} outputs"]

        for entry in self.entries:
            if entry.dropped:
                lines.append(f"  {entry.source.label} -> dropped (gate closed)")
                continue

            line = (f"  {entry.source.label} -> {entry.output.label}: absorb {entry.absorption_us:.2f} us, "
                    f"control {entry.control_down_us:.2f}/{entry.control_up_us:.2f} us, "
                    f"gate [{entry.gate[0]:.2f}, {entry.gate[1]:.2f}) us, "
                    f"shift {entry.shift_hz / 1e6:+g} MHz")
            if entry.weight != 1:
                line += f", ratio {entry.weight:g}"
            if entry.phase is not None:
                line += f", phase {entry.phase:g}"
            if entry.merged:
                line += ", merged"

            lines.append(line)

        return "\n".join(lines)


def _as_op_list(ops: OpsLike) -> List[ConversionOp]:
    if isinstance(ops, (Retime, FrequencyShift, Split, Drop)):
        return [ops]
    return list(ops)


def _collect(mode: ModeId, ops: Iterable[ConversionOp], lines: Tuple[int, ...]):
    retime, shift, split, drop = None, None, None, None

    for op in ops:
        if isinstance(op, Retime):
            if retime is not None:
                raise ScheduleError(f"{mode.label}: more than one retime", lines)
            retime = op
        elif isinstance(op, FrequencyShift):
            if shift is not None:
                raise ScheduleError(f"{mode.label}: more than one frequency shift", lines)
            shift = op
        elif isinstance(op, Split):
            if split is not None:
                raise ScheduleError(f"{mode.label}: more than one split", lines)
            split = op
        elif isinstance(op, Drop):
            drop = op
        else:
            raise ScheduleError(f"{mode.label}: unknown operation {op!r}", lines)

    if drop is not None and (retime or shift or split):
        raise ScheduleError(f"{mode.label}: drop can't be combined with other operations", lines)
    if split is not None and retime is not None:
        raise ScheduleError(f"{mode.label}: split already sets the read-out slots, it can't be combined "
                            f"with retime", lines)

    return retime, shift, split, drop


def plan_conversion(inputs: Sequence[ModeId],
                    ops: Mapping[ModeId, OpsLike],
                    timing: TimingParameters = TimingParameters(),
                    lines: Optional[Mapping[ModeId, Sequence[int]]] = None) -> PulseTimeline:
    """
    Compile a map of conversion operations into a pulse timeline.

    Retime moves the read-out control pulse, FrequencyShift sets the gate AOM, Split issues partial
    read-outs at several slots and Drop keeps the gate closed. Inputs with no operation are read out
    in their own slot. `lines` maps modes to schedule-file line numbers for diagnostics

    Raises:
        ScheduleError: on invalid operation maps, CollisionError/TimingError on infeasible plans

    """
    lines = {} if lines is None else {mode: tuple(ls) for mode, ls in lines.items()}

    seen = set()
    for mode in inputs:
        if mode in seen:
            raise ScheduleError(f"{mode.label} is listed twice as input", lines.get(mode, ()))
        seen.add(mode)

        try:
            mode.check_in_grid(timing.nf, timing.nt)
        except ValidationError as e:
            raise ScheduleError(str(e), lines.get(mode, ())) from None

    unknown = [mode for mode in ops if mode not in seen]
    if unknown:
        raise ScheduleError(f"operations reference modes that are not inputs: {[m.label for m in unknown]}",
                            sorted({line for mode in unknown for line in lines.get(mode, ())}))

    entries = []
    for mode in inputs:
        mode_lines = lines.get(mode, ())
        retime, shift, split, drop = _collect(mode, _as_op_list(ops.get(mode, [])), mode_lines)

        absorption = timing.input_time(mode.t)
        echo = absorption + timing.afc_delay_us
        control_down = echo - timing.control_lead_us

        if drop is not None:
            t_out = timing.output_time(mode.t)
            entries.append(ChannelEntry(source=mode, output=None, absorption_us=absorption, echo_us=echo,
                                        control_down_us=control_down, control_up_us=control_down + t_out - echo,
                                        t_out_us=t_out, gate=None, lines=mode_lines))
            continue

        target_f = shift.target_f if shift is not None else mode.f
        merged = bool((retime is not None and retime.merge) or (shift is not None and shift.merge))

        if split is not None:
            readouts = [(t, r, split.phase if k > 0 else 0.0) for k, (t, r) in enumerate(zip(split.targets,
                                                                                            split.ratios))]
        else:
            readouts = [(retime.target_t if retime is not None else mode.t, 1.0, None)]

        for target_t, weight, phase in readouts:
            output = ModeId(target_f, target_t, mode.s)
            try:
                output.check_in_grid(timing.nf, timing.nt)
            except ValidationError as e:
                raise ScheduleError(f"{mode.label}: target {e}", mode_lines) from None

            t_out = timing.output_time(target_t)
            t_spin = t_out - echo
            if t_spin < timing.min_spin_time_us - _TIME_TOL:
                raise TimingError(f"{mode.label}: recall at t{target_t} ({t_out:.2f} us) would leave {t_spin:.2f} us "
                                  f"in the spin level, at least {timing.min_spin_time_us} us are needed",
                                  mode_lines)

            half_gate = timing.gate_width_us / 2
            entries.append(ChannelEntry(source=mode, output=output, absorption_us=absorption, echo_us=echo,
                                        control_down_us=control_down, control_up_us=control_down + t_spin,
                                        t_out_us=t_out, gate=(t_out - half_gate, t_out + half_gate),
                                        shift_hz=(target_f - mode.f) * timing.spectral_spacing_hz,
                                        weight=weight, phase=phase, merged=merged, lines=mode_lines))

    return PulseTimeline(tuple(entries), timing)
