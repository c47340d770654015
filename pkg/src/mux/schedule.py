"""
Declarative schedule files for the mode converter.

One directive per line, `#` starts a comment:

    grid 2 5                  optional, overrides the configured (nf, nt)
    inputs f1t1 f2t2          input modes; if omitted, the modes used by the operations
    f1t1 retime t2 [merge]
    f2t2 shift f1 [merge]
    f1t1 split t1 t2 [r ...] [phase]
    f2t2 drop

Several lines may target the same input mode (e.g. a shift and a retime). For a two-way split the
numbers are `r phase`; for k > 2 targets they are k ratios optionally followed by the phase
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple

from src.exceptions import ScheduleParseError, ScheduleWarning, ValidationError
from src.mux.conversion import (Retime, FrequencyShift, Split, Drop, ConversionOp, TimingParameters, PulseTimeline,
                                plan_conversion)
from src.mux.modes import ModeId


@dataclass(frozen=True)
class Schedule:
    inputs: Tuple[ModeId, ...]
    ops: Dict[ModeId, Tuple[ConversionOp, ...]]
    lines: Dict[ModeId, Tuple[int, ...]]
    grid: Optional[Tuple[int, int]] = None
    source_name: str = field(default="<schedule>")

    @property
    def is_empty(self) -> bool:
        return len(self.inputs) == 0


def _parse_index(token: str, prefix: str, line_no: int) -> int:
    if not token.startswith(prefix) or not token[len(prefix):].isdigit() or int(token[len(prefix):]) < 1:
        raise ScheduleParseError(f"expected a {prefix}<n> index, got {token!r}", [line_no])

    return int(token[len(prefix):])


def _parse_mode(token: str, line_no: int) -> ModeId:
    try:
        return ModeId.parse(token)
    except ValidationError as e:
        raise ScheduleParseError(str(e), [line_no]) from None


def _parse_float(token: str, line_no: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise ScheduleParseError(f"expected a number, got {token!r}", [line_no]) from None


def _parse_op(keyword: str, args: List[str], line_no: int) -> ConversionOp:
    merge = False
    if keyword in ("retime", "shift") and args and args[-1] == "merge":
        merge = True
        args = args[:-1]

    if keyword == "retime":
        if len(args) != 1:
            raise ScheduleParseError("retime takes exactly one target slot, e.g. 'retime t2'", [line_no])
        return Retime(_parse_index(args[0], "t", line_no), merge=merge)

    if keyword == "shift":
        if len(args) != 1:
            raise ScheduleParseError("shift takes exactly one target channel, e.g. 'shift f2'", [line_no])
        return FrequencyShift(_parse_index(args[0], "f", line_no), merge=merge)

    if keyword == "split":
        targets = [_parse_index(tok, "t", line_no) for tok in args if tok.startswith("t")]
        numbers = [_parse_float(tok, line_no) for tok in args if not tok.startswith("t")]

        n = len(targets)
        phase = 0.0
        if n == 2 and len(numbers) == 2:
            ratios, phase = numbers[:1], numbers[1]
        elif n > 2 and len(numbers) == n + 1:
            ratios, phase = numbers[:n], numbers[n]
        else:
            ratios = numbers

        try:
            return Split(tuple(targets), tuple(ratios), phase)
        except ValidationError as e:
            raise ScheduleParseError(str(e), [line_no]) from None

    if keyword == "drop":
        if args:
            raise ScheduleParseError("drop takes no arguments", [line_no])
        return Drop()

    raise ScheduleParseError(f"unknown operation {keyword!r}, expected retime, shift, split or drop", [line_no])


def parse_schedule(text: str, source_name: str = "<schedule>") -> Schedule:
    """
    Raises:
        ScheduleParseError: with the offending line number on unknown modes, operations or malformed
            arguments

    """
    declared_inputs: Optional[List[ModeId]] = None
    input_line = None
    grid = None
    ops: Dict[ModeId, List[ConversionOp]] = {}
    lines: Dict[ModeId, List[int]] = {}

    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        tokens = raw_line.split("#", 1)[0].split()
        if not tokens:
            continue

        head, args = tokens[0], tokens[1:]

        if head in ("input", "inputs"):
            if declared_inputs is not None:
                raise ScheduleParseError(f"inputs already declared at line {input_line}", [line_no])
            if not args:
                raise ScheduleParseError("inputs line lists no mode", [line_no])

            declared_inputs = []
            for token in args:
                mode = _parse_mode(token, line_no)
                if mode in declared_inputs:
                    raise ScheduleParseError(f"{mode.label} is listed twice as input", [line_no])
                declared_inputs.append(mode)
            input_line = line_no

        elif head == "grid":
            if len(args) != 2 or not all(a.isdigit() and int(a) >= 1 for a in args):
                raise ScheduleParseError("grid takes two positive integers, e.g. 'grid 2 5'", [line_no])
            grid = (int(args[0]), int(args[1]))

        else:
            mode = _parse_mode(head, line_no)
            if not args:
                raise ScheduleParseError(f"missing operation after {mode.label}", [line_no])

            ops.setdefault(mode, []).append(_parse_op(args[0], args[1:], line_no))
            lines.setdefault(mode, []).append(line_no)

    if declared_inputs is not None:
        undeclared = [mode for mode in ops if mode not in declared_inputs]
        if undeclared:
            bad_lines = sorted(line for mode in undeclared for line in lines[mode])
            raise ScheduleParseError(f"{undeclared[0].label} is not among the declared inputs", bad_lines)

        inputs = tuple(declared_inputs)
        for mode in inputs:
            if mode not in lines:
                lines[mode] = [input_line]
    else:
        inputs = tuple(ops)

    return Schedule(inputs=inputs,
                    ops={mode: tuple(mode_ops) for mode, mode_ops in ops.items()},
                    lines={mode: tuple(mode_lines) for mode, mode_lines in lines.items()},
                    grid=grid,
                    source_name=source_name)


def load_schedule(path: str) -> Schedule:
    with open(path, "r", encoding="utf-8") as f:
        return parse_schedule(f.read(), source_name=path)


def compile_schedule(schedule: Schedule, timing: TimingParameters = TimingParameters()) -> PulseTimeline:
    """Plan the schedule, warning (not failing) when it has no channel"""
    if schedule.grid is not None:
        timing = replace(timing, nf=schedule.grid[0], nt=schedule.grid[1])

    if schedule.is_empty:
        warnings.warn(f"{schedule.source_name}: no channels", ScheduleWarning)

    return plan_conversion(schedule.inputs, schedule.ops, timing, schedule.lines)
