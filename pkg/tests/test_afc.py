import numpy as np
import pytest

from src.exceptions import ScheduleError, ValidationError
from src.memory import (AfcComb, PreparationParameters, build_spectral_structure, echo_amplitude, echo_efficiency,
                        scan_echo_delay, temporal_capacity, spectral_capacity, multimode_capacity, filter_transmits,
                        storage_timeline)


class TestSpectralStructure:

    def test_default_comb_has_ten_teeth(self):
        comb = AfcComb(delta_hz=200e3, bandwidth_hz=2e6)
        profile = build_spectral_structure(PreparationParameters(combs=(comb,)))

        assert comb.n_teeth == 10
        assert profile.teeth_per_comb() == [10]

    def test_double_comb(self):
        profile = build_spectral_structure(PreparationParameters.double_comb(separation_hz=80e6))

        assert profile.teeth_per_comb() == [10, 10]
        assert profile.comb_centers()[1] - profile.comb_centers()[0] == 80e6

        # the line outside the pits stays opaque
        assert profile.optical_depth.max() == 6.0

    def test_gaussian_teeth(self):
        profile = build_spectral_structure(PreparationParameters.double_comb(tooth_shape="gaussian"))

        assert profile.teeth_per_comb() == [10, 10]

    def test_narrow_teeth_vanish(self):
        sharp = build_spectral_structure(PreparationParameters(combs=(AfcComb(finesse=1e6),)))
        wide = build_spectral_structure(PreparationParameters(combs=(AfcComb(finesse=4),)))

        assert sharp.tooth_area() == [0.0]
        assert wide.tooth_area()[0] > 0

    def test_coarse_resolution(self):
        with pytest.raises(ValidationError, match="coarser"):
            build_spectral_structure(PreparationParameters(resolution_hz=20e3))

    def test_comb_wider_than_pit(self):
        with pytest.raises(ValidationError, match="pit"):
            build_spectral_structure(PreparationParameters(combs=(AfcComb(bandwidth_hz=20e6),), pit_width_hz=16e6))

    @pytest.mark.parametrize("kwargs", [
        {"delta_hz": 0},
        {"bandwidth_hz": 100e3},
        {"finesse": 1.0},
        {"peak_od": -1},
        {"tooth_shape": "lorentzian"},
        {"efficiency_override": 1.5},
    ])
    def test_invalid_comb(self, kwargs):
        with pytest.raises(ValidationError):
            AfcComb(**kwargs)


class TestEcho:

    @pytest.mark.parametrize("delta_hz", [50e3, 100e3, 200e3, 500e3])
    def test_echo_at_inverse_spacing(self, delta_hz):
        comb = AfcComb(delta_hz=delta_hz, bandwidth_hz=10 * delta_hz)
        delays, efficiencies = scan_echo_delay(comb)

        assert delays[np.argmax(efficiencies)] == pytest.approx(1e6 / delta_hz, rel=1e-9)
        assert comb.storage_time_us == pytest.approx(1e6 / delta_hz)

    def test_amplitude_has_no_constant_part(self):
        comb = AfcComb()

        assert abs(echo_amplitude(comb, 0.0)) < 1e-12
        assert abs(echo_amplitude(comb, comb.storage_time_us)) > 0

    @pytest.mark.parametrize("tooth_shape", ["square", "gaussian"])
    def test_efficiency_from_amplitude(self, tooth_shape):
        comb = AfcComb(tooth_shape=tooth_shape)
        amplitude = echo_amplitude(comb, comb.storage_time_us)

        expected = min(abs(2 * amplitude) ** 2 * np.exp(-comb.background_od), 1.0)
        assert echo_efficiency(comb, comb.storage_time_us) == pytest.approx(expected, rel=1e-12)

    def test_gaussian_teeth_echo(self):
        square = AfcComb(tooth_shape="square")
        gaussian = AfcComb(tooth_shape="gaussian")
        delays, efficiencies = scan_echo_delay(gaussian)

        assert delays[np.argmax(efficiencies)] == pytest.approx(gaussian.storage_time_us, rel=1e-9)

        ratio = echo_efficiency(gaussian, gaussian.storage_time_us) / echo_efficiency(square, square.storage_time_us)
        assert 0.5 < ratio < 2.0

    def test_uniform_absorber_has_no_echo(self):
        comb = AfcComb(peak_od=1.0, background_od=1.0)

        assert echo_efficiency(comb, comb.storage_time_us) < 1e-20

    def test_efficiency_is_bounded(self):
        comb = AfcComb(peak_od=20.0, background_od=0.0)

        assert 0 <= echo_efficiency(comb, comb.storage_time_us) <= 1

    def test_override(self):
        comb = AfcComb(efficiency_override=0.0551)

        assert echo_efficiency(comb, 5.0) == 0.0551
        assert echo_efficiency(comb, 3.0) == 0.0551

        # the scan ignores the override
        _, efficiencies = scan_echo_delay(comb)
        assert not np.all(efficiencies == 0.0551)


class TestCapacity:

    def test_temporal(self):
        assert temporal_capacity(AfcComb(delta_hz=200e3, bandwidth_hz=2e6)) == 10
        assert temporal_capacity(AfcComb(delta_hz=200e3, bandwidth_hz=200e3)) == 1

    def test_spectral(self):
        assert spectral_capacity(5e9, 80e6) == 62

        with pytest.raises(ValidationError):
            spectral_capacity(5e9, 0)

    def test_multimode(self):
        assert multimode_capacity(2, 2, 3) == 12
        assert multimode_capacity(60, 50, 51) == 153000

        with pytest.raises(ValidationError):
            multimode_capacity(0, 2, 3)

    def test_filter(self):
        assert filter_transmits(0.0)
        assert filter_transmits(0.9e6)
        assert not filter_transmits(80e6)


class TestTimeline:

    def test_default_storage(self):
        timeline = storage_timeline(200e3, 7.68)

        assert timeline.afc_delay_us == pytest.approx(5.0)
        assert timeline.total_storage_us == pytest.approx(12.68, abs=1e-12)
        assert timeline.t_spin_us == pytest.approx(7.68)
        assert timeline.t_control_down_us < timeline.t_echo_us < timeline.t_out_us

    def test_plain_afc_echo(self):
        assert storage_timeline(200e3, 0.0).total_storage_us == pytest.approx(5.0)
        assert storage_timeline(100e3, 0.0).total_storage_us == pytest.approx(10.0)

    def test_output_window(self):
        start, end = storage_timeline(200e3, 7.68).output_window(1.0)

        assert start == pytest.approx(12.18)
        assert end == pytest.approx(13.18)

    def test_control_before_absorption(self):
        with pytest.raises(ScheduleError):
            storage_timeline(200e3, 1.0, control_lead_us=6.0)

    @pytest.mark.parametrize("delta_hz, t_spin_us", [(0, 1.0), (200e3, -1.0)])
    def test_invalid(self, delta_hz, t_spin_us):
        with pytest.raises(ValidationError):
            storage_timeline(delta_hz, t_spin_us)
