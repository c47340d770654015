import numpy as np
import pytest

from src.exceptions import ScheduleError, CollisionError, TimingError, ValidationError
from src.memory.afc import filter_transmits
from src.mux import (ModeId, Retime, FrequencyShift, Split, Drop, TimingParameters, ChannelEntry, PulseTimeline,
                     plan_conversion)

F1T1, F1T2, F2T1, F2T2 = ModeId(1, 1), ModeId(1, 2), ModeId(2, 1), ModeId(2, 2)


def outputs_by_source(plan):
    return {entry.source: entry.output for entry in plan.entries}


class TestOperations:

    def test_storage_without_operations(self, timing):
        plan = plan_conversion([F1T1, F2T2], {}, timing)

        assert outputs_by_source(plan) == {F1T1: F1T1, F2T2: F2T2}
        assert [entry.t_out_us for entry in plan.entries] == pytest.approx([12.68, 14.68])
        assert plan.entries[0].t_spin_us == pytest.approx(7.68)

    def test_exchange(self, timing):
        plan = plan_conversion([F1T1, F2T2], {F1T1: Retime(2), F2T2: Retime(1)}, timing)

        assert outputs_by_source(plan) == {F1T1: F1T2, F2T2: F2T1}
        assert plan.entries[1].t_spin_us == pytest.approx(5.68)

    def test_multiplexer(self, timing):
        plan = plan_conversion([F1T1, F2T2], {F2T2: Retime(1)}, timing)

        assert plan.outputs == [F1T1, F2T1]
        assert plan.entries[0].gate == pytest.approx(plan.entries[1].gate)

    def test_frequency_shift(self, timing):
        plan = plan_conversion([F1T1, F2T2], {F1T1: FrequencyShift(2)}, timing)

        assert outputs_by_source(plan) == {F1T1: F2T1, F2T2: F2T2}
        assert plan.entries[0].shift_hz == 80e6
        assert plan.entries[1].shift_hz == 0.0

    def test_split_and_drop(self, timing):
        plan = plan_conversion([F1T1, F2T2], {F1T1: Split((1, 2), (0.5,), 0.3), F2T2: Drop()}, timing)

        assert plan.outputs == [F1T1, F1T2]
        split_entries = plan.entries_for(F1T1)
        assert [entry.weight for entry in split_entries] == [0.5, 0.5]
        assert [entry.phase for entry in split_entries] == [0.0, 0.3]
        assert split_entries[0].control_down_us == split_entries[1].control_down_us

        dropped = plan.entries_for(F2T2)[0]
        assert dropped.dropped and dropped.gate is None
        assert "dropped" in plan.summary()

    def test_summary(self, timing):
        plan = plan_conversion([F1T1, F2T2], {F1T1: Retime(2), F2T2: Retime(1)}, timing)

        assert plan.summary().splitlines()[0] == "valid: 2 channels, 2 outputs"

    def test_operations_commute(self, timing):
        a = plan_conversion([F1T1], {F1T1: [Retime(2), FrequencyShift(2)]}, timing)
        b = plan_conversion([F1T1], {F1T1: [FrequencyShift(2), Retime(2)]}, timing)

        assert a.entries == b.entries
        assert a.outputs == [F2T2]

    def test_empty_plan(self, timing):
        plan = plan_conversion([], {}, timing)

        assert plan.entries == ()
        assert plan.summary() == "valid: 0 channels, 0 outputs"


class TestRejections:

    def test_collision(self, timing):
        with pytest.raises(CollisionError, match="without merge"):
            plan_conversion([F1T1, F2T2], {F1T1: FrequencyShift(2), F2T2: Retime(1)}, timing)

    def test_merge_allows_shared_output(self, timing):
        plan = plan_conversion([F1T1, F2T2], {F1T1: FrequencyShift(2), F2T2: Retime(1, merge=True)}, timing)

        assert plan.outputs == [F2T1]

    def test_collision_reports_lines(self, timing):
        with pytest.raises(CollisionError) as excinfo:
            plan_conversion([F1T1, F2T2], {F1T1: FrequencyShift(2), F2T2: Retime(1)}, timing,
                            lines={F1T1: [2], F2T2: [3]})

        assert excinfo.value.lines == (2, 3)
        assert str(excinfo.value).startswith("lines 2, 3:")

    def test_not_enough_spin_time(self):
        timing = TimingParameters(min_spin_time_us=6.0)

        plan_conversion([F1T1], {}, timing)
        with pytest.raises(TimingError, match="spin level"):
            plan_conversion([F2T2], {F2T2: Retime(1)}, timing)

    def test_target_outside_grid(self, timing):
        with pytest.raises(ScheduleError, match="outside the grid"):
            plan_conversion([F1T1], {F1T1: Retime(3)}, timing)

        with pytest.raises(ScheduleError, match="outside the grid"):
            plan_conversion([F1T1], {F1T1: FrequencyShift(3)}, timing)

    def test_input_outside_grid(self, timing):
        with pytest.raises(ScheduleError):
            plan_conversion([ModeId(3, 1)], {}, timing)

    def test_operation_on_unknown_mode(self, timing):
        with pytest.raises(ScheduleError, match="not inputs"):
            plan_conversion([F1T1], {F2T2: Retime(1)}, timing)

    def test_duplicate_input(self, timing):
        with pytest.raises(ScheduleError, match="twice"):
            plan_conversion([F1T1, F1T1], {}, timing)

    @pytest.mark.parametrize("ops", [
        [Retime(1), Retime(2)],
        [Drop(), Retime(2)],
        [Split((1, 2)), Retime(2)],
    ], ids=["double-retime", "drop-and-retime", "split-and-retime"])
    def test_conflicting_operations(self, timing, ops):
        with pytest.raises(ScheduleError):
            plan_conversion([F1T1], {F1T1: ops}, timing)

    @pytest.mark.parametrize("targets, ratios", [((1,), ()), ((1, 1), ()), ((1, 2), (0.5, 0.6)), ((1, 2), (1.0,)),
                                                 ((1, 2, 3), (0.5, 0.5))])
    def test_invalid_split(self, targets, ratios):
        with pytest.raises(ValidationError):
            Split(targets, ratios)

    def test_split_ratios(self):
        assert Split((1, 2)).ratios == (0.5, 0.5)
        assert Split((1, 2), (0.3,)).ratios == pytest.approx((0.3, 0.7))
        assert Split((1, 2, 3)).ratios == pytest.approx((1 / 3, 1 / 3, 1 / 3))

    def test_invalid_timing_parameters(self):
        with pytest.raises(ValidationError):
            TimingParameters(slot_pitch_us=0)


class TestTimelineInvariants:

    def entry(self, **overrides):
        fields = dict(source=F1T1, output=F1T1, absorption_us=0.0, echo_us=5.0, control_down_us=4.5,
                      control_up_us=12.18, t_out_us=12.68, gate=(12.18, 13.18))
        fields.update(overrides)
        return ChannelEntry(**fields)

    def test_valid_entry(self):
        PulseTimeline((self.entry(),))

    def test_control_after_echo(self):
        with pytest.raises(TimingError, match="does not precede"):
            PulseTimeline((self.entry(control_down_us=5.5, control_up_us=13.18),))

    def test_inconsistent_retrieval(self):
        with pytest.raises(ScheduleError, match="inconsistent"):
            PulseTimeline((self.entry(t_out_us=13.0),))

    def test_wrong_shifter_setting(self):
        with pytest.raises(ScheduleError, match="shifter"):
            PulseTimeline((self.entry(output=F2T1),))

    def test_overlapping_gates_on_different_outputs(self):
        other = self.entry(source=F1T2, output=F1T2, absorption_us=2.0, echo_us=7.0, control_down_us=6.5,
                           control_up_us=12.68, t_out_us=13.18, gate=(12.68, 13.68))

        with pytest.raises(CollisionError, match="overlap"):
            PulseTimeline((self.entry(), other))


def _random_ops(rng, mode, nf, nt):
    kind = rng.choice(["none", "retime", "shift", "both", "split", "split_shift", "drop"])
    target_t = int(rng.integers(1, nt + 2))
    target_f = int(rng.integers(1, nf + 2))
    merge = bool(rng.random() < 0.3)
    split_targets = tuple(int(t) for t in rng.choice(nt + 1, size=2, replace=False) + 1)

    if kind == "none":
        return [], [(mode.f, mode.t, False)]
    if kind == "retime":
        return [Retime(target_t, merge)], [(mode.f, target_t, merge)]
    if kind == "shift":
        return [FrequencyShift(target_f, merge)], [(target_f, mode.t, merge)]
    if kind == "both":
        return [FrequencyShift(target_f, merge), Retime(target_t)], [(target_f, target_t, merge)]
    if kind == "split":
        return [Split(split_targets)], [(mode.f, t, False) for t in split_targets]
    if kind == "split_shift":
        return [Split(split_targets), FrequencyShift(target_f, merge)], [(target_f, t, merge) for t in split_targets]

    return [Drop()], []


def _predict_valid(inputs, outputs, nf, nt, min_spin_us):
    """Independent feasibility rule for the default timing, where gates only overlap on a shared output"""
    for mode in inputs:
        for f, t, _ in outputs[mode]:
            if not (1 <= f <= nf and 1 <= t <= nt):
                return False
            if 7.68 + 2.0 * (t - mode.t) < min_spin_us - 1e-9:
                return False

    flat = [out for mode in inputs for out in outputs[mode]]
    for i, (f_a, t_a, merge_a) in enumerate(flat):
        for f_b, t_b, merge_b in flat[i + 1:]:
            if (f_a, t_a) == (f_b, t_b) and not (merge_a or merge_b):
                return False

    return True


def _check_accepted(plan):
    timing = plan.timing
    open_entries = [entry for entry in plan.entries if not entry.dropped]

    for entry in plan.entries:
        assert entry.absorption_us <= entry.control_down_us < entry.echo_us
        assert entry.echo_us - entry.absorption_us == pytest.approx(timing.afc_delay_us)
        assert entry.t_spin_us >= timing.min_spin_time_us - 1e-9
        assert entry.t_out_us == pytest.approx(entry.echo_us + entry.t_spin_us)

    for entry in open_entries:
        assert 1 <= entry.output.f <= timing.nf and 1 <= entry.output.t <= timing.nt
        assert entry.shift_hz == (entry.output.f - entry.source.f) * timing.spectral_spacing_hz
        assert filter_transmits(entry.shift_hz - (entry.output.f - entry.source.f) * timing.spectral_spacing_hz)

    for i, a in enumerate(open_entries):
        for b in open_entries[i + 1:]:
            if a.output.f == b.output.f and a.gate[0] < b.gate[1] and b.gate[0] < a.gate[1]:
                assert a.output == b.output and (a.merged or b.merged)


def test_random_schedules():
    rng = np.random.default_rng(99)
    accepted = rejected = 0

    for _ in range(10_000):
        nf, nt = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        min_spin_us = float(rng.choice([1.0, 4.0, 6.0]))
        timing = TimingParameters(nf=nf, nt=nt, min_spin_time_us=min_spin_us)

        grid = [ModeId(f, t) for f in range(1, nf + 1) for t in range(1, nt + 1)]
        n_inputs = int(rng.integers(1, min(4, len(grid)) + 1))
        inputs = [grid[i] for i in rng.choice(len(grid), size=n_inputs, replace=False)]

        ops, outputs = {}, {}
        for mode in inputs:
            ops[mode], outputs[mode] = _random_ops(rng, mode, nf, nt)

        expected = _predict_valid(inputs, outputs, nf, nt, min_spin_us)

        try:
            plan = plan_conversion(inputs, ops, timing)
        except ScheduleError as e:
            assert not expected, f"rejected a feasible schedule: {e}"
            assert str(e)
            rejected += 1
            continue

        assert expected, "accepted an infeasible schedule"
        _check_accepted(plan)
        accepted += 1

    assert accepted > 1000 and rejected > 1000
