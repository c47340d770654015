from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Tuple

import numpy as np
import scipy.linalg

from src.exceptions import ValidationError

DIM = 3

# the nine operators used to expand the process matrix, ordered over the (|L>, |G>, |R>) basis.
# lambda_1 is the identity, lambda_2..lambda_9 are the Gell-Mann matrices in the memory experiment ordering
LAMBDA_MATRICES: Tuple[np.ndarray, ...] = (
    np.array([[1, 0, 0],
              [0, 1, 0],
              [0, 0, 1]], dtype=complex),
    np.array([[0, 1, 0],
              [1, 0, 0],
              [0, 0, 0]], dtype=complex),
    np.array([[0, -1j, 0],
              [1j, 0, 0],
              [0, 0, 0]], dtype=complex),
    np.array([[1, 0, 0],
              [0, -1, 0],
              [0, 0, 0]], dtype=complex),
    np.array([[0, 0, 1],
              [0, 0, 0],
              [1, 0, 0]], dtype=complex),
    np.array([[0, 0, -1j],
              [0, 0, 0],
              [1j, 0, 0]], dtype=complex),
    np.array([[0, 0, 0],
              [0, 0, 1],
              [0, 1, 0]], dtype=complex),
    np.array([[0, 0, 0],
              [0, 0, -1j],
              [0, 1j, 0]], dtype=complex),
    np.array([[1, 0, 0],
              [0, 1, 0],
              [0, 0, -2]], dtype=complex) / np.sqrt(3),
)


@dataclass(frozen=True, eq=False)
class LambdaBasis:
    """
    Ordered operator basis over which process matrices are expanded.

    The basis is orthogonal under the Hilbert-Schmidt product but not normalized (the identity has
    squared norm 3, the other eight operators 2), so every change of basis goes through explicit
    linear solves or the `norms` vector, never through the assumption of orthonormality
    """

    operators: Tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.operators) != DIM ** 2:
            raise ValidationError(f"A qutrit operator basis needs {DIM ** 2} operators, got {len(self.operators)}")

        frozen_ops = []
        for i, op in enumerate(self.operators, start=1):
            op = np.array(op, dtype=complex)

            if op.shape != (DIM, DIM):
                raise ValidationError(f"lambda_{i} has shape {op.shape}, expected {(DIM, DIM)}")
            if not np.allclose(op, op.conj().T, rtol=0, atol=1e-12):
                raise ValidationError(f"lambda_{i} is not Hermitian")

            op.setflags(write=False)
            frozen_ops.append(op)

        stacked = np.stack([op.reshape(-1) for op in frozen_ops], axis=1)
        if np.linalg.matrix_rank(stacked) != DIM ** 2:
            raise ValidationError("The basis operators are not linearly independent")

        object.__setattr__(self, "operators", tuple(frozen_ops))

    @classmethod
    def default(cls) -> LambdaBasis:
        return LAMBDA_BASIS

    def __len__(self):
        return len(self.operators)

    def __getitem__(self, item: int) -> np.ndarray:
        return self.operators[item]

    @cached_property
    def stacked(self) -> np.ndarray:
        # (9, 3, 3) array, read only
        arr = np.stack(self.operators)
        arr.setflags(write=False)
        return arr

    @cached_property
    def expansion_matrix(self) -> np.ndarray:
        # column i is the row-major flattening of lambda_i
        arr = np.stack([op.reshape(-1) for op in self.operators], axis=1)
        arr.setflags(write=False)
        return arr

    @cached_property
    def norms(self) -> np.ndarray:
        arr = np.array([np.sqrt(np.trace(op.conj().T @ op).real) for op in self.operators])
        arr.setflags(write=False)
        return arr

    @cached_property
    def gram(self) -> np.ndarray:
        # gram[i, j] = Tr(lambda_i^dagger lambda_j)
        arr = np.einsum('iab,jab->ij', self.stacked.conj(), self.stacked)
        arr.setflags(write=False)
        return arr

    @cached_property
    def orthonormal(self) -> np.ndarray:
        """Basis operators divided by their Hilbert-Schmidt norm"""
        if not np.allclose(self.gram, np.diag(np.diag(self.gram)), rtol=0, atol=1e-12):
            # Gram-Schmidt on the flattened operators, keeping the original ordering
            q, _ = np.linalg.qr(self.expansion_matrix)
            arr = np.stack([q[:, i].reshape(DIM, DIM) for i in range(DIM ** 2)])
        else:
            arr = self.stacked / self.norms[:, None, None]

        arr.setflags(write=False)
        return arr


LAMBDA_BASIS = LambdaBasis(LAMBDA_MATRICES)


def lambda_expand(op: np.ndarray, basis: LambdaBasis = LAMBDA_BASIS) -> np.ndarray:
    """
    Coefficients c_i such that op = sum_i c_i lambda_i.

    The 9x9 linear system is solved directly, so the result is exact for any complete basis
    whatever its normalization

    """
    op = np.asarray(op, dtype=complex)
    if op.shape != (DIM, DIM):
        raise ValidationError(f"Expected a {DIM}x{DIM} operator, got shape {op.shape}")

    return scipy.linalg.solve(basis.expansion_matrix, op.reshape(-1))


def lambda_combine(coefficients: np.ndarray, basis: LambdaBasis = LAMBDA_BASIS) -> np.ndarray:
    coefficients = np.asarray(coefficients, dtype=complex)
    if coefficients.shape != (DIM ** 2,):
        raise ValidationError(f"Expected {DIM ** 2} coefficients, got shape {coefficients.shape}")

    return np.einsum('i,iab->ab', coefficients, basis.stacked)
