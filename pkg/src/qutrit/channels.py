from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg

from src.exceptions import ChannelError, ValidationError
from src.qutrit.basis import DIM, LAMBDA_BASIS, LambdaBasis, lambda_expand
from src.qutrit.states import DensityMatrix, StateLike, _as_density

CHI_HERMITIAN_TOL = 1e-10
CHI_PSD_TOL = 1e-8
CHI_TP_TOL = 1e-8

# apply_channel refuses maps whose trace preservation is worse than this
APPLY_TP_TOL = 1e-6


def tp_operator(chi: np.ndarray, basis: LambdaBasis = LAMBDA_BASIS) -> np.ndarray:
    """sum_mn chi_mn lambda_n^dagger lambda_m, equal to the identity for a trace preserving map"""
    ops = basis.stacked
    return np.einsum('mn,nki,mkj->ij', chi, ops.conj(), ops)


def tp_residual(chi: np.ndarray, basis: LambdaBasis = LAMBDA_BASIS) -> float:
    return float(np.max(np.abs(tp_operator(chi, basis) - np.eye(DIM))))


@lru_cache(maxsize=4)
def chi_to_superoperator_matrix(basis: LambdaBasis = LAMBDA_BASIS) -> np.ndarray:
    """
    Linear map B such that vec(S) = B @ chi.reshape(-1), where S is the column-stacking superoperator
    of the channel, vec(rho_out) = S vec(rho_in).

    With column stacking vec(A X B) = (B^T kron A) vec(X), so each (m, n) term contributes
    conj(lambda_n) kron lambda_m
    """
    ops = basis.stacked
    cols = [np.kron(ops[n].conj(), ops[m]).reshape(-1, order="F")
            for m in range(DIM ** 2) for n in range(DIM ** 2)]

    arr = np.stack(cols, axis=1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ProcessMatrix:
    """
    Quantum channel on a qutrit written as a 9x9 chi matrix over a LambdaBasis:
    rho_out = sum_mn chi_mn lambda_m rho lambda_n^dagger

    Validation checks Hermiticity (1e-10), positivity (-1e-8) and trace preservation (1e-8). Set
    `validate=False` only for intermediate matrices such as raw least-squares estimates
    """

    chi: np.ndarray
    basis: LambdaBasis = field(default=LAMBDA_BASIS)
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        chi = np.array(self.chi, dtype=complex)

        if chi.shape != (DIM ** 2, DIM ** 2):
            raise ValidationError(f"chi must be {DIM ** 2}x{DIM ** 2}, got shape {chi.shape}")

        if self.validate:
            herm_dev = np.max(np.abs(chi - chi.conj().T))
            if herm_dev > CHI_HERMITIAN_TOL:
                raise ValidationError(f"chi is not Hermitian (max deviation {herm_dev:.3e})")

            min_eig = scipy.linalg.eigvalsh((chi + chi.conj().T) / 2).min()
            if min_eig < -CHI_PSD_TOL:
                raise ValidationError(f"chi is not positive semidefinite (min eigenvalue {min_eig:.3e})")

            residual = tp_residual(chi, self.basis)
            if residual > CHI_TP_TOL:
                raise ChannelError(f"chi is not trace preserving (residual {residual:.3e})")

        chi.setflags(write=False)
        object.__setattr__(self, "chi", chi)

    @property
    def tp_residual(self) -> float:
        return tp_residual(self.chi, self.basis)

    def superoperator(self) -> np.ndarray:
        return (chi_to_superoperator_matrix(self.basis) @ self.chi.reshape(-1)).reshape(DIM ** 2, DIM ** 2, order="F")

    def orthonormal_chi(self) -> np.ndarray:
        """chi expressed over the Hilbert-Schmidt orthonormal version of the basis"""
        norms = self.basis.norms
        return norms[:, None] * self.chi * norms[None, :]

    @classmethod
    def from_superoperator(cls, superop: np.ndarray, basis: LambdaBasis = LAMBDA_BASIS,
                           validate: bool = True) -> ProcessMatrix:
        superop = np.asarray(superop, dtype=complex)
        if superop.shape != (DIM ** 2, DIM ** 2):
            raise ValidationError(f"Superoperator must be {DIM ** 2}x{DIM ** 2}, got shape {superop.shape}")

        chi_vec = scipy.linalg.solve(chi_to_superoperator_matrix(basis), superop.reshape(-1, order="F"))
        chi = chi_vec.reshape(DIM ** 2, DIM ** 2)
        return cls((chi + chi.conj().T) / 2, basis, validate)


def apply_channel(chi: ProcessMatrix, rho: StateLike) -> DensityMatrix:
    """rho_out = sum_mn chi_mn lambda_m rho lambda_n^dagger"""
    residual = chi.tp_residual
    if residual > APPLY_TP_TOL:
        raise ChannelError(f"Process matrix violates trace preservation by {residual:.3e} (tolerance {APPLY_TP_TOL})")

    rho = _as_density(rho)
    ops = chi.basis.stacked

    out = np.einsum('mn,mij,jk,nlk->il', chi.chi, ops, rho.entries, ops.conj())
    return DensityMatrix.from_array(out)


def identity_process(basis: LambdaBasis = LAMBDA_BASIS) -> ProcessMatrix:
    return unitary_process(np.eye(DIM), basis)


def unitary_process(unitary: np.ndarray, basis: LambdaBasis = LAMBDA_BASIS) -> ProcessMatrix:
    unitary = np.asarray(unitary, dtype=complex)
    if unitary.shape != (DIM, DIM) or not np.allclose(unitary.conj().T @ unitary, np.eye(DIM), rtol=0, atol=1e-10):
        raise ValidationError("Target operation is not a 3x3 unitary")

    coeffs = lambda_expand(unitary, basis)
    chi = np.outer(coeffs, coeffs.conj())
    return ProcessMatrix((chi + chi.conj().T) / 2, basis)


def depolarizing_process(p: float, basis: LambdaBasis = LAMBDA_BASIS) -> ProcessMatrix:
    """rho -> (1 - p) rho + p I/3"""
    if not 0 <= p <= 1:
        raise ValidationError(f"Depolarizing probability must be in [0, 1], got {p}")

    identity_chi = identity_process(basis).chi

    # the completely depolarizing map is I/3 over any orthonormal operator basis
    norms = basis.norms
    full_chi = np.eye(DIM ** 2) / DIM / (norms[:, None] * norms[None, :])

    return ProcessMatrix((1 - p) * identity_chi + p * full_chi, basis)


def compose(first: ProcessMatrix, second: ProcessMatrix) -> ProcessMatrix:
    """Channel applying `first` and then `second`"""
    if first.basis is not second.basis:
        raise ValidationError("Cannot compose process matrices expressed over different bases")

    superop = second.superoperator() @ first.superoperator()
    return ProcessMatrix.from_superoperator(superop, first.basis)
