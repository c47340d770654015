import numpy as np
import pytest

from src.exceptions import ValidationError
from src.qutrit.states import (QutritKet, DensityMatrix, ket_to_density, state_fidelity, trace_distance, purity,
                               random_pure_ket, random_density, random_unitary, PSI_1, PSI_2, KET_L, KET_G, KET_R)


class TestQutritKet:

    def test_basis_states(self):
        assert np.array_equal(KET_L.amplitudes, [1, 0, 0])
        assert np.array_equal(KET_G.amplitudes, [0, 1, 0])
        assert np.array_equal(KET_R.amplitudes, [0, 0, 1])

        with pytest.raises(ValidationError):
            QutritKet.basis_state("X")

    def test_named_states(self):
        assert abs(PSI_1.overlap(PSI_1) - 1) < 1e-12
        assert abs(PSI_1.overlap(PSI_2)) ** 2 == pytest.approx(1 / 9 * abs(2 - 1j) ** 2)

    def test_not_normalized(self):
        with pytest.raises(ValidationError, match="not normalized"):
            QutritKet(np.array([1, 1, 0], dtype=complex))

        ket = QutritKet.from_amplitudes(1, 1, 0, normalize=True)
        assert np.allclose(ket.amplitudes, [1 / np.sqrt(2), 1 / np.sqrt(2), 0])

        with pytest.raises(ValidationError):
            QutritKet.from_amplitudes(0, 0, 0, normalize=True)

    def test_wrong_dimension(self):
        with pytest.raises(ValidationError):
            QutritKet(np.array([1, 0], dtype=complex))

    def test_immutable(self):
        with pytest.raises(ValueError):
            PSI_1.amplitudes[0] = 0


class TestDensityMatrix:

    def test_valid(self):
        rho = ket_to_density(PSI_1)

        assert np.allclose(rho.entries, np.ones((3, 3)) / 3)
        assert purity(rho) == pytest.approx(1)
        assert purity(DensityMatrix.maximally_mixed()) == pytest.approx(1 / 3)

    @pytest.mark.parametrize("entries", [
        np.array([[0.5, 0.1], [0.1, 0.5]]),
        np.array([[0.5, 0.2, 0], [0, 0.5, 0], [0, 0, 0]]),
        np.diag([0.5, 0.4, 0.0]),
        np.diag([0.6, 0.6, -0.2]),
    ], ids=["shape", "not-hermitian", "trace", "negative"])
    def test_invalid(self, entries):
        with pytest.raises(ValidationError):
            DensityMatrix(entries)

    def test_from_array_cleanup(self):
        rho = DensityMatrix.from_array(np.diag([0.7, 0.3 + 1e-8, -1e-8]))

        assert rho.eigenvalues().min() >= -1e-15
        assert np.trace(rho.entries).real == pytest.approx(1, abs=1e-12)

        with pytest.raises(ValidationError):
            DensityMatrix.from_array(np.diag([0.7, 0.4, -0.1]))

    def test_expectation(self):
        rho = ket_to_density(KET_G)
        projector = np.diag([0, 1, 0])

        assert rho.expectation(projector) == pytest.approx(1)


class TestFidelity:

    def test_self_fidelity(self, rng):
        for _ in range(200):
            rho = random_density(rng, rank=int(rng.integers(1, 4)))
            assert state_fidelity(rho, rho) == pytest.approx(1, abs=1e-10)

    def test_symmetric_and_bounded(self, rng):
        for _ in range(1000):
            rho = random_density(rng)
            sigma = random_density(rng)

            f = state_fidelity(rho, sigma)
            assert 0 <= f <= 1
            assert f == pytest.approx(state_fidelity(sigma, rho), abs=1e-10)

    def test_pure_state_overlap(self, rng):
        for _ in range(1000):
            psi = random_pure_ket(rng)
            phi = random_pure_ket(rng)

            expected = abs(psi.overlap(phi)) ** 2
            assert state_fidelity(psi.density(), phi.density()) == pytest.approx(expected, abs=1e-10)

    def test_orthogonal_states(self):
        assert state_fidelity(KET_L.density(), KET_R.density()) == pytest.approx(0, abs=1e-12)
        assert trace_distance(KET_L.density(), KET_R.density()) == pytest.approx(1)

    def test_maximally_mixed(self):
        assert state_fidelity(PSI_1.density(), DensityMatrix.maximally_mixed()) == pytest.approx(1 / 3)

    def test_accepts_arrays(self):
        assert state_fidelity(np.ones((3, 3)) / 3, ket_to_density(PSI_1)) == pytest.approx(1)


def test_random_unitary(rng):
    for _ in range(20):
        u = random_unitary(rng)
        assert np.allclose(u.conj().T @ u, np.eye(3), atol=1e-12)


def test_random_density_rank(rng):
    rho = random_density(rng, rank=1)
    assert purity(rho) == pytest.approx(1, abs=1e-10)

    with pytest.raises(ValidationError):
        random_density(rng, rank=4)
