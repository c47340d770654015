import os

import pytest

from src import SCHEDULES_DIR
from src.exceptions import ScheduleParseError, CollisionError, ScheduleWarning
from src.mux import ModeId, Retime, FrequencyShift, Split, Drop, TimingParameters, parse_schedule, load_schedule, \
    compile_schedule

SCHEDULE_FILES = sorted(name for name in os.listdir(SCHEDULES_DIR) if name.endswith(".sched"))


def test_parse_exchange():
    schedule = load_schedule(os.path.join(SCHEDULES_DIR, "psi1_exchange.sched"))

    assert schedule.inputs == (ModeId(1, 1), ModeId(2, 2))
    assert schedule.ops == {ModeId(1, 1): (Retime(2),), ModeId(2, 2): (Retime(1),)}
    assert schedule.lines == {ModeId(1, 1): (3,), ModeId(2, 2): (4,)}


@pytest.mark.parametrize("name", SCHEDULE_FILES)
def test_bundled_schedules_compile(name):
    plan = compile_schedule(load_schedule(os.path.join(SCHEDULES_DIR, name)), TimingParameters())

    assert len(plan.sources) >= 1
    assert plan.summary().startswith("valid:")


def test_exchange_summary():
    plan = compile_schedule(load_schedule(os.path.join(SCHEDULES_DIR, "psi1_exchange.sched")))

    assert plan.summary().splitlines()[0] == "valid: 2 channels, 2 outputs"


def test_full_syntax():
    text = """
    grid 2 3           # larger temporal grid
    inputs f1t1 f1t2 f2t2
    f1t1 split t1 t2 0.3 1.57
    f1t2 split t1 t2 t3 0.2 0.3 0.5
    f2t2 shift f1 merge
    f2t2 retime t3
    """
    schedule = parse_schedule(text)

    assert schedule.grid == (2, 3)
    assert schedule.ops[ModeId(1, 1)] == (Split((1, 2), (0.3,), 1.57),)
    assert schedule.ops[ModeId(1, 2)][0].ratios == (0.2, 0.3, 0.5)
    assert schedule.ops[ModeId(1, 2)][0].phase == 0.0
    assert schedule.ops[ModeId(2, 2)] == (FrequencyShift(1, merge=True), Retime(3))
    assert schedule.lines[ModeId(2, 2)] == (6, 7)


def test_split_without_numbers_is_even():
    schedule = parse_schedule("f1t1 split t1 t2\nf2t2 drop\n")

    assert schedule.ops[ModeId(1, 1)] == (Split((1, 2)),)
    assert schedule.ops[ModeId(2, 2)] == (Drop(),)
    assert schedule.inputs == (ModeId(1, 1), ModeId(2, 2))


def test_inputs_without_operations_keep_their_line():
    schedule = parse_schedule("inputs f1t1 f2t2\nf1t1 retime t2\n")

    assert schedule.lines[ModeId(2, 2)] == (1,)


@pytest.mark.parametrize("text, line", [
    ("inputs f1t1\nf1t1 teleport t2\n", 2),
    ("inputs f1t1\ng1t1 retime t2\n", 2),
    ("f1t1 retime 2\n", 1),
    ("f1t1 retime t2 t1\n", 1),
    ("f1t1 shift\n", 1),
    ("# comment\n\nf1t1\n", 3),
    ("f1t1 split t1\n", 1),
    ("f1t1 split t1 t2 x\n", 1),
    ("f1t1 drop now\n", 1),
    ("grid 2\n", 1),
    ("inputs f1t1\ninputs f2t2\n", 2),
    ("inputs f1t1 f1t1\n", 1),
    ("inputs\n", 1),
], ids=["unknown-op", "bad-mode", "bad-slot", "extra-arg", "missing-arg", "missing-op", "one-target",
        "bad-number", "drop-arg", "bad-grid", "inputs-twice", "duplicate-input", "no-inputs"])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(ScheduleParseError) as excinfo:
        parse_schedule(text)

    assert excinfo.value.lines == (line,)
    assert str(excinfo.value).startswith(f"line {line}:")


def test_undeclared_mode():
    with pytest.raises(ScheduleParseError, match="declared inputs") as excinfo:
        parse_schedule("inputs f1t1\nf1t1 retime t2\nf2t2 retime t1\n")

    assert excinfo.value.lines == (3,)


def test_collision_reports_both_lines():
    schedule = parse_schedule("inputs f1t1 f2t2\nf1t1 shift f2\nf2t2 retime t1\n")

    with pytest.raises(CollisionError, match="^lines 2, 3:"):
        compile_schedule(schedule)


def test_grid_directive_overrides_timing():
    schedule = parse_schedule("grid 1 3\nf1t1 retime t3\n")

    plan = compile_schedule(schedule, TimingParameters(nf=2, nt=2))
    assert plan.outputs == [ModeId(1, 3)]


def test_empty_schedule_warns():
    with pytest.warns(ScheduleWarning, match="no channels"):
        plan = compile_schedule(parse_schedule("# nothing to do\n", source_name="empty.sched"))

    assert plan.summary() == "valid: 0 channels, 0 outputs"
