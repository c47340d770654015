from __future__ import annotations

import warnings
from typing import NamedTuple, Sequence

import numpy as np
import scipy.linalg

from src.exceptions import RankDeficiencyError, ValidationError, ConvergenceWarning
from src.qutrit.basis import DIM, LAMBDA_BASIS, LambdaBasis
from src.qutrit.channels import ProcessMatrix, chi_to_superoperator_matrix, unitary_process, CHI_PSD_TOL, CHI_TP_TOL
from src.qutrit.states import StateLike, _as_density

MAX_PROJECTION_ROUNDS = 1000
PROJECTION_TOL = 1e-8

# provenance: average fidelity reachable by a measure-and-resend strategy on qutrits, as reported
# for the OAM qutrit memory experiment (derivation not reproduced here)
CLASSICAL_BOUND = 0.831


def _tp_constraint(basis: LambdaBasis) -> np.ndarray:
    # row-major vec of sum_mn chi_mn lambda_n^dagger lambda_m, as a (9, 81) matrix acting on chi.reshape(-1)
    ops = basis.stacked
    terms = np.einsum('nki,mkj->mnij', ops.conj(), ops)
    return terms.reshape(DIM ** 4, DIM ** 2).T


def _project_psd(chi: np.ndarray) -> np.ndarray:
    chi = (chi + chi.conj().T) / 2
    eigvals, eigvecs = scipy.linalg.eigh(chi)
    return (eigvecs * np.clip(eigvals, 0, None)) @ eigvecs.conj().T


def _project_tp(chi: np.ndarray, constraint: np.ndarray, constraint_pinv: np.ndarray) -> np.ndarray:
    residual = constraint @ chi.reshape(-1) - np.eye(DIM).reshape(-1)
    projected = (chi.reshape(-1) - constraint_pinv @ residual).reshape(DIM ** 2, DIM ** 2)
    return (projected + projected.conj().T) / 2


def project_cptp(chi: np.ndarray,
                 basis: LambdaBasis = LAMBDA_BASIS,
                 max_rounds: int = MAX_PROJECTION_ROUNDS,
                 tol: float = PROJECTION_TOL) -> np.ndarray:
    """
    Nearest (Frobenius) Hermitian positive semidefinite chi satisfying trace preservation.

    Dykstra's alternating projections between the PSD cone and the trace-preserving affine
    subspace; the iterate returned is always exactly trace preserving and stops as soon as its
    smallest eigenvalue is above -tol

    """
    constraint = _tp_constraint(basis)
    constraint_pinv = scipy.linalg.pinv(constraint)

    x = _project_tp((chi + chi.conj().T) / 2, constraint, constraint_pinv)
    if scipy.linalg.eigvalsh(x).min() >= -tol:
        return x

    p = np.zeros_like(x)
    q = np.zeros_like(x)
    for _ in range(max_rounds):
        y = _project_psd(x + p)
        p = x + p - y

        x_new = _project_tp(y + q, constraint, constraint_pinv)
        q = y + q - x_new
        x = x_new

        if scipy.linalg.eigvalsh(x).min() >= -tol:
            return x

    warnings.warn(f"CPTP projection did not reach tolerance {tol} in {max_rounds} rounds", ConvergenceWarning)
    return x


def reconstruct_process(input_states: Sequence[StateLike],
                        output_states: Sequence[StateLike],
                        basis: LambdaBasis = LAMBDA_BASIS,
                        max_rounds: int = MAX_PROJECTION_ROUNDS) -> ProcessMatrix:
    """
    Process matrix mapping each input density matrix onto the corresponding output.

    chi is first obtained in least squares from vec(out_j) = sum_mn chi_mn vec(lambda_m in_j
    lambda_n^dagger), then projected onto the physical (CPTP) set

    Raises:
        RankDeficiencyError: if the input states do not span the space of 3x3 operators

    """
    if len(input_states) != len(output_states):
        raise ValidationError(f"Got {len(input_states)} input states but {len(output_states)} output states")

    inputs = [_as_density(rho).entries for rho in input_states]
    outputs = [_as_density(rho).entries for rho in output_states]

    in_vecs = np.stack([rho.reshape(-1, order="F") for rho in inputs], axis=1)
    rank = np.linalg.matrix_rank(in_vecs, tol=1e-10)
    if rank < DIM ** 2:
        raise RankDeficiencyError(f"Input states span a space of dimension {rank}, {DIM ** 2} linearly "
                                  f"independent inputs are needed")

    # vec(S v) = (v^T kron I) vec(S) and vec(S) = B chi
    b = chi_to_superoperator_matrix(basis)
    design = np.concatenate([np.kron(v[None, :], np.eye(DIM ** 2)) @ b for v in in_vecs.T], axis=0)
    target = np.concatenate([rho.reshape(-1, order="F") for rho in outputs])

    chi_vec, *_ = scipy.linalg.lstsq(design, target)
    chi = chi_vec.reshape(DIM ** 2, DIM ** 2)

    chi = project_cptp(chi, basis, max_rounds=max_rounds)

    physical = (scipy.linalg.eigvalsh(chi).min() >= -CHI_PSD_TOL and
                np.max(np.abs(_tp_constraint(basis) @ chi.reshape(-1) - np.eye(DIM).reshape(-1))) <= CHI_TP_TOL)

    return ProcessMatrix(chi, basis, validate=physical)


def process_fidelity(chi: ProcessMatrix, target_unitary: np.ndarray) -> float:
    """
    F = Tr(chi_target chi) / (Tr chi_target Tr chi), with both matrices expressed over the
    orthonormalized basis. For the identity target this is the normalized weight of the identity
    component

    Raises:
        ValidationError: if the target is not unitary

    """
    target = unitary_process(target_unitary, chi.basis).orthonormal_chi()
    actual = chi.orthonormal_chi()

    fidelity = np.trace(target @ actual).real / (np.trace(target).real * np.trace(actual).real)
    return float(min(max(fidelity, 0.0), 1.0))


def average_fidelity(chi: ProcessMatrix, target_unitary: np.ndarray) -> float:
    """Average state fidelity over Haar-random pure inputs, (d F_process + 1) / (d + 1)"""
    return (DIM * process_fidelity(chi, target_unitary) + 1) / (DIM + 1)


class BoundVerdict(NamedTuple):
    passed: bool
    fidelity: float
    bound: float
    margin: float

    def __bool__(self):
        return self.passed


def classical_bound_check(fidelity: float, bound: float = CLASSICAL_BOUND) -> BoundVerdict:
    if not 0 <= fidelity <= 1:
        raise ValidationError(f"Fidelity must be in [0, 1], got {fidelity}")

    return BoundVerdict(passed=fidelity > bound, fidelity=fidelity, bound=bound, margin=fidelity - bound)
