import itertools
import math

import numpy as np
import pytest

from src.exceptions import ValidationError
from src.memory import MemoryCalibration
from src.mux import ModeId, mode_grid, ChannelPayload, LeakageModel, CrosstalkMatrix, run_multiplexed, crosstalk_min
from src.qutrit.states import PSI_1


class TestModes:

    @pytest.mark.parametrize("dims, expected", [((2, 2, 3), 12), ((1, 1, 1), 1), ((60, 50, 51), 153000)])
    def test_grid_size(self, dims, expected):
        assert len(mode_grid(*dims)) == expected

    def test_grid_sizes_and_order(self):
        for nf, nt, ns in itertools.product(range(1, 9), repeat=3):
            grid = mode_grid(nf, nt, ns)

            assert len(grid) == nf * nt * ns
            assert len(set(grid)) == len(grid)
            assert grid == sorted(grid, key=lambda m: (m.f, m.t))

    def test_grid_labels(self):
        grid = mode_grid(2, 2, 3)

        assert [m.label for m in grid[:4]] == ["f1t1s:L", "f1t1s:G", "f1t1s:R", "f1t2s:L"]
        assert mode_grid(1, 1, 5)[-1].s == "s5"

    def test_empty_grid(self):
        with pytest.raises(ValidationError):
            mode_grid(0, 2, 3)

    def test_parse(self):
        assert ModeId.parse("f1t2") == ModeId(1, 2)
        assert ModeId.parse("f2t1s:L") == ModeId(2, 1, "L")
        assert ModeId.parse(ModeId(2, 1, "R").label) == ModeId(2, 1, "R")
        assert str(ModeId(1, 1)) == "f1t1"

    @pytest.mark.parametrize("label", ["x1t1", "f1", "f0t1", "f1t0", "f1t1s:"])
    def test_parse_invalid(self, label):
        with pytest.raises(ValidationError):
            ModeId.parse(label)

    def test_check_in_grid(self):
        ModeId(2, 2).check_in_grid(2, 2)

        with pytest.raises(ValidationError, match="temporal"):
            ModeId(1, 3).check_in_grid(2, 2)

        with pytest.raises(ValidationError, match="spatial"):
            ModeId(1, 1, "s4").check_in_grid(2, 2, ns=3)

    def test_payload(self):
        payload = ChannelPayload(ModeId(1, 1), state=PSI_1.density().entries)

        assert payload.origin == ModeId(1, 1)
        assert ChannelPayload(ModeId(2, 1), source=ModeId(1, 1)).origin == ModeId(1, 1)

        with pytest.raises(ValidationError):
            ChannelPayload(ModeId(1, 1), mean_photons=-1)

        with pytest.raises(ValidationError):
            ChannelPayload(ModeId(1, 1), split_ratio=0.0)


class TestLeakage:

    def test_between(self):
        leak = LeakageModel(spectral=0.01, temporal=0.02, spatial=0.03)

        assert leak.between(ModeId(1, 1, "L"), ModeId(1, 1, "L")) == 0.0
        assert leak.between(ModeId(1, 1, "L"), ModeId(2, 1, "L")) == 0.01
        assert leak.between(ModeId(1, 1, "L"), ModeId(2, 2, "L")) == 0.02
        assert leak.between(ModeId(1, 1, "L"), ModeId(2, 2, "R")) == 0.03

    @pytest.mark.parametrize("value", [-0.1, 1.0])
    def test_out_of_range(self, value):
        with pytest.raises(ValidationError):
            LeakageModel.uniform(value)


class TestCrosstalk:

    def payloads(self, nf=2, nt=2, ns=3):
        return [ChannelPayload(mode, mean_photons=1.04) for mode in mode_grid(nf, nt, ns)]

    def test_no_leak_no_noise(self, noiseless_cal):
        matrix = run_multiplexed(self.payloads(), noiseless_cal, leak=0.0, trials=10_000, seed=0)
        counts = matrix.counts

        assert counts.shape == (12, 12)
        assert np.all(counts[~np.eye(12, dtype=bool)] == 0)
        assert np.all(np.diag(counts) > 0)
        assert crosstalk_min(matrix) == math.inf

    def test_leakage_between_combs(self, noiseless_cal):
        payloads = self.payloads(nf=2, nt=1, ns=1)
        matrix = run_multiplexed(payloads, noiseless_cal, leak=0.5, trials=100_000, seed=4)

        assert [mode.f for mode in matrix.modes] == [1, 2]
        assert np.diag(matrix.counts) == pytest.approx([104_000] * 2, rel=0.02)
        assert [matrix.counts[0, 1], matrix.counts[1, 0]] == pytest.approx([52_000] * 2, rel=0.02)

    def test_calibrated_ratio(self, mux_cal):
        matrix = run_multiplexed(self.payloads(), mux_cal, leak=0.0015, trials=1_000_000, seed=1)

        assert crosstalk_min(matrix) == pytest.approx(19.7, rel=0.3)

    def test_seeded(self, mux_cal):
        first = run_multiplexed(self.payloads(), mux_cal, leak=0.0015, trials=1000, seed=2)
        second = run_multiplexed(self.payloads(), mux_cal, leak=0.0015, trials=1000, seed=2)

        assert np.array_equal(first.counts, second.counts)

    def test_duplicate_modes(self, mux_cal):
        payloads = self.payloads()
        with pytest.raises(ValidationError, match="Duplicate"):
            run_multiplexed(payloads + payloads[:1], mux_cal, leak=0.0, trials=10)

    def test_frame(self, mux_cal):
        matrix = run_multiplexed(self.payloads(), mux_cal, leak=0.0015, trials=1000, seed=3)
        df = matrix.to_frame()

        assert df.index.name == "input_mode"
        assert list(df.columns)[:2] == ["f1t1s:L", "f1t1s:G"]
        assert np.array_equal(CrosstalkMatrix.from_frame(df).counts, matrix.counts)


class TestCrosstalkMin:

    def modes(self, n):
        return tuple(mode_grid(1, n, 1))

    def test_ratio(self):
        counts = np.array([[20, 1], [1, 40]])
        assert crosstalk_min(CrosstalkMatrix(self.modes(2), counts)) == 20.0

    def test_smallest_row(self):
        counts = np.array([[20, 1, 2], [1, 40, 1], [5, 1, 30]])
        assert crosstalk_min(CrosstalkMatrix(self.modes(3), counts)) == 6.0

    def test_zero_diagonal(self):
        counts = np.array([[0, 1], [1, 40]])
        assert crosstalk_min(CrosstalkMatrix(self.modes(2), counts)) == 0.0

    def test_no_off_diagonal(self):
        counts = np.array([[10, 0], [0, 40]])
        assert crosstalk_min(CrosstalkMatrix(self.modes(2), counts)) == math.inf

    def test_empty(self):
        with pytest.raises(ValidationError):
            crosstalk_min(CrosstalkMatrix((), np.zeros((0, 0))))

    def test_shape_mismatch(self):
        with pytest.raises(ValidationError):
            CrosstalkMatrix(self.modes(2), np.zeros((3, 3)))
