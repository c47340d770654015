from __future__ import annotations

from dataclasses import dataclass
from typing import Union, Sequence

import numpy as np
import scipy.linalg

from src.exceptions import ValidationError
from src.qutrit.basis import DIM

BASIS_LABELS = ("L", "G", "R")

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10

# eigenvalues below this are treated as exact zeros when taking square roots
SQRT_CUTOFF = 1e-12

# tolerance used when cleaning the output of a numerical procedure (channel application, reconstruction)
# into a valid density matrix
_CLEANUP_TOL = 1e-6


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class QutritKet:
    """Pure qutrit state, amplitudes ordered as (|L>, |G>, |R>)"""

    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = np.asarray(self.amplitudes, dtype=complex)

        if amplitudes.shape != (DIM,):
            raise ValidationError(f"A qutrit ket has {DIM} amplitudes, got shape {amplitudes.shape}")

        norm_sq = float(np.vdot(amplitudes, amplitudes).real)
        if abs(norm_sq - 1) > NORM_TOL:
            raise ValidationError(f"Ket is not normalized: sum |a_i|^2 = {norm_sq!r}")

        object.__setattr__(self, "amplitudes", _freeze(amplitudes))

    @classmethod
    def from_amplitudes(cls, *amplitudes: complex, normalize: bool = False) -> QutritKet:
        amplitudes = np.array(amplitudes, dtype=complex)
        if normalize:
            norm = np.linalg.norm(amplitudes)
            if norm == 0:
                raise ValidationError("Cannot normalize the null vector")
            amplitudes = amplitudes / norm

        return cls(amplitudes)

    @classmethod
    def basis_state(cls, label: str) -> QutritKet:
        try:
            idx = BASIS_LABELS.index(label)
        except ValueError:
            raise ValidationError(f"Unknown basis label {label!r}, valid labels are {BASIS_LABELS}") from None

        amplitudes = np.zeros(DIM, dtype=complex)
        amplitudes[idx] = 1
        return cls(amplitudes)

    def overlap(self, other: QutritKet) -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def density(self) -> DensityMatrix:
        return ket_to_density(self)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)

        if entries.shape != (DIM, DIM):
            raise ValidationError(f"A qutrit density matrix is {DIM}x{DIM}, got shape {entries.shape}")

        herm_dev = np.max(np.abs(entries - entries.conj().T))
        if herm_dev > HERMITIAN_TOL:
            raise ValidationError(f"Density matrix is not Hermitian (max deviation {herm_dev:.3e})")

        trace = np.trace(entries)
        if abs(trace - 1) > TRACE_TOL:
            raise ValidationError(f"Density matrix trace is {trace.real:.15g}, expected 1")

        min_eig = scipy.linalg.eigvalsh(entries).min()
        if min_eig < -PSD_TOL:
            raise ValidationError(f"Density matrix is not positive semidefinite (min eigenvalue {min_eig:.3e})")

        object.__setattr__(self, "entries", _freeze(entries))

    @classmethod
    def from_array(cls, arr: np.ndarray, tol: float = _CLEANUP_TOL) -> DensityMatrix:
        """
        Builds a density matrix from the result of a numerical procedure.

        The array is made exactly Hermitian, eigenvalues in [-tol, 0) are set to zero and the trace is
        renormalized. Anything that can't be fixed within `tol` is rejected

        """
        arr = np.asarray(arr, dtype=complex)
        if arr.shape != (DIM, DIM):
            raise ValidationError(f"A qutrit density matrix is {DIM}x{DIM}, got shape {arr.shape}")

        if np.max(np.abs(arr - arr.conj().T)) > tol:
            raise ValidationError("Array is not Hermitian within tolerance")

        arr = (arr + arr.conj().T) / 2
        eigvals, eigvecs = scipy.linalg.eigh(arr)

        if eigvals.min() < -tol:
            raise ValidationError(f"Array is not positive semidefinite (min eigenvalue {eigvals.min():.3e})")

        eigvals = np.clip(eigvals, 0, None)
        total = eigvals.sum()
        if total <= 0:
            raise ValidationError("Array has zero trace")

        arr = (eigvecs * (eigvals / total)) @ eigvecs.conj().T
        return cls((arr + arr.conj().T) / 2)

    @classmethod
    def maximally_mixed(cls) -> DensityMatrix:
        return cls(np.eye(DIM) / DIM)

    def eigenvalues(self) -> np.ndarray:
        return scipy.linalg.eigvalsh(self.entries)

    def expectation(self, op: np.ndarray) -> float:
        # op is Hermitian in every use (projectors), imaginary part is rounding noise
        return float(np.trace(self.entries @ op).real)

    def __repr__(self):
        return f"DensityMatrix(\n{np.array2string(self.entries, precision=4, suppress_small=True)}\n)"


StateLike = Union[DensityMatrix, np.ndarray]


def _as_density(rho: StateLike) -> DensityMatrix:
    return rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho)


def _psd_sqrt(mat: np.ndarray) -> np.ndarray:
    eigvals, eigvecs = scipy.linalg.eigh(mat)
    eigvals = np.where(eigvals < SQRT_CUTOFF, 0, eigvals)
    return (eigvecs * np.sqrt(eigvals)) @ eigvecs.conj().T


def ket_to_density(psi: Union[QutritKet, Sequence[complex], np.ndarray]) -> DensityMatrix:
    if not isinstance(psi, QutritKet):
        psi = QutritKet(np.asarray(psi, dtype=complex))

    a = psi.amplitudes
    return DensityMatrix(np.outer(a, a.conj()))


def state_fidelity(rho_in: StateLike, rho_out: StateLike) -> float:
    """
    Uhlmann fidelity F = Tr(sqrt(sqrt(rho_out) rho_in sqrt(rho_out)))^2.

    Both square roots go through a Hermitian eigendecomposition: eigenvalues smaller than 1e-12 (which
    includes the small negative ones left by reconstruction noise) count as zero

    """
    rho_in = _as_density(rho_in)
    rho_out = _as_density(rho_out)

    sqrt_out = _psd_sqrt(rho_out.entries)
    inner = sqrt_out @ rho_in.entries @ sqrt_out
    inner = (inner + inner.conj().T) / 2

    eigvals = scipy.linalg.eigvalsh(inner)
    eigvals = np.where(eigvals < SQRT_CUTOFF, 0, eigvals)

    fidelity = float(np.sum(np.sqrt(eigvals)) ** 2)
    return min(max(fidelity, 0.0), 1.0)


def trace_distance(rho: StateLike, sigma: StateLike) -> float:
    rho = _as_density(rho)
    sigma = _as_density(sigma)

    diff = rho.entries - sigma.entries
    return float(0.5 * np.sum(np.abs(scipy.linalg.eigvalsh((diff + diff.conj().T) / 2))))


def purity(rho: StateLike) -> float:
    rho = _as_density(rho)
    return float(np.trace(rho.entries @ rho.entries).real)


def random_pure_ket(rng: np.random.Generator) -> QutritKet:
    # normalized complex Gaussian vector, Haar distributed
    vec = rng.normal(size=DIM) + 1j * rng.normal(size=DIM)
    return QutritKet(vec / np.linalg.norm(vec))


def random_density(rng: np.random.Generator, rank: int = DIM) -> DensityMatrix:
    if not 1 <= rank <= DIM:
        raise ValidationError(f"rank must be in [1, {DIM}], got {rank}")

    ginibre = rng.normal(size=(DIM, rank)) + 1j * rng.normal(size=(DIM, rank))
    rho = ginibre @ ginibre.conj().T
    return DensityMatrix.from_array(rho / np.trace(rho).real)


def random_unitary(rng: np.random.Generator) -> np.ndarray:
    z = (rng.normal(size=(DIM, DIM)) + 1j * rng.normal(size=(DIM, DIM))) / np.sqrt(2)
    q, r = scipy.linalg.qr(z)

    # fix the phases so that the distribution is Haar
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


KET_L = QutritKet.basis_state("L")
KET_G = QutritKet.basis_state("G")
KET_R = QutritKet.basis_state("R")

PSI_1 = QutritKet(np.array([1, 1, 1], dtype=complex) / np.sqrt(3))
PSI_2 = QutritKet(np.array([1, 1, -1j], dtype=complex) / np.sqrt(3))
