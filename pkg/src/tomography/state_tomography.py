from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from src.exceptions import ReconstructionError, ValidationError, ConvergenceWarning
from src.qutrit.basis import DIM, LAMBDA_BASIS
from src.qutrit.states import DensityMatrix, StateLike, _as_density
from src.tomography.settings import TomographySettings, CountRecord, aggregate_records, DEFAULT_SETTINGS
from src.utils import make_rng, SeedLike

MAX_ITERATIONS = 10_000
CONVERGENCE_TOL = 1e-10

# a step is halved at most this many times before the iterate is considered a numerical optimum
_MAX_DILUTIONS = 60

# linear-inversion estimates with no eigenvalue below this are accepted as the maximum-likelihood state
PHYSICAL_EIGENVALUE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class TomographyResult:
    rho_hat: DensityMatrix
    log_likelihood: float
    std_error_fidelity: float = float("nan")
    iterations: int = 0
    converged: bool = True
    likelihood_history: Optional[Tuple[float, ...]] = None

    def with_error(self, std_error_fidelity: float) -> TomographyResult:
        return replace(self, std_error_fidelity=std_error_fidelity)


def _mean_counts(rho: DensityMatrix, settings: TomographySettings, exposure: int,
                 noise_rate: float, eta_detect: float) -> np.ndarray:
    probs = np.clip(settings.probabilities(rho.entries), 0, 1)
    return exposure * (probs * eta_detect + noise_rate)


def _check_measurement_params(exposure: int, noise_rate: float, eta_detect: float):
    if exposure < 1:
        raise ValidationError(f"exposure must be at least 1, got {exposure}")
    if noise_rate < 0:
        raise ValidationError(f"noise_rate must be non-negative, got {noise_rate}")
    if not 0 <= eta_detect <= 1:
        raise ValidationError(f"eta_detect must be in [0, 1], got {eta_detect}")


def simulate_counts(rho: StateLike,
                    settings: TomographySettings = DEFAULT_SETTINGS,
                    exposure: int = 1_000_000,
                    noise_rate: float = 0.0,
                    seed: SeedLike = 42,
                    eta_detect: float = 1.0) -> List[CountRecord]:
    """
    Poisson photon counts for every projector of `settings`, each measured in its own exposure window.

    Mean counts for projector i are exposure * (Tr(rho Pi_i) * eta_detect + noise_rate). In the
    memory scenarios `eta_detect` is the full probability of detecting the stored photon in one
    trial (mean photon number times storage and detection efficiencies)

    """
    _check_measurement_params(exposure, noise_rate, eta_detect)
    rho = _as_density(rho)

    rng = make_rng(seed)
    means = _mean_counts(rho, settings, exposure, noise_rate, eta_detect)
    counts = rng.poisson(means)

    return [CountRecord(i, int(c), exposure) for i, c in enumerate(counts)]


def expected_records(rho: StateLike,
                     settings: TomographySettings = DEFAULT_SETTINGS,
                     exposure: int = 1_000_000,
                     noise_rate: float = 0.0,
                     eta_detect: float = 1.0) -> List[CountRecord]:
    """Infinite-statistics records: counts are the exact means of `simulate_counts`"""
    _check_measurement_params(exposure, noise_rate, eta_detect)
    rho = _as_density(rho)

    means = _mean_counts(rho, settings, exposure, noise_rate, eta_detect)
    return [CountRecord(i, float(m), exposure, exact=True) for i, m in enumerate(means)]


def _log_likelihood(counts: np.ndarray, exposures: np.ndarray, probs: np.ndarray) -> float:
    # Poisson likelihood with the unknown overall rate profiled out:
    # sum_i n_i log(e_i p_i / sum_j e_j p_j), invariant under rescaling of rho
    mask = counts > 0
    if np.any(probs[mask] <= 0):
        return -np.inf

    total_rate = np.dot(exposures, probs)
    return float(np.sum(counts[mask] * np.log(exposures[mask] * probs[mask] / total_rate)))


def reconstruct_state(records: Sequence[CountRecord],
                      settings: TomographySettings = DEFAULT_SETTINGS,
                      max_iter: int = MAX_ITERATIONS,
                      tol: float = CONVERGENCE_TOL,
                      track_likelihood: bool = False,
                      closed_form: bool = True) -> TomographyResult:
    """
    Maximum-likelihood density matrix from projective photon counts.

    When the linear-inversion estimate is already a density matrix it fits every count rate exactly,
    so it is the maximum of the likelihood and is returned without iterating (`closed_form=False`
    always iterates).

    Iterates rho <- N[M rho M^dagger] with M = H^-1 R(rho), R(rho) = sum_i n_i / p_i(rho) Pi_i and
    H = sum_i e_i Pi_i, starting from I/3. The H^-1 factor accounts for the projectors not summing to
    a multiple of the identity and for unequal exposures; with equal exposures on a set of projectors
    summing to the identity it reduces to the plain R rho R step.

    If a full step lowers the likelihood it is diluted, rho <- N[(I + eps M) rho (I + eps M)^dagger],
    halving eps until the likelihood does not decrease, so the likelihood sequence is monotone.

    Iteration stops when the largest entry change is below `tol` or after `max_iter` iterations; in
    the latter case the last (best) iterate is returned and a ConvergenceWarning is emitted

    Raises:
        ReconstructionError: when some setting has no record or all counts are zero

    """
    counts, exposures = aggregate_records(records, len(settings))

    if counts.sum() <= 0:
        raise ReconstructionError("All counts are zero, nothing to reconstruct")

    if closed_form:
        estimate = _linear_estimate(counts, exposures, settings)
        eigvals, eigvecs = scipy.linalg.eigh(estimate)

        if eigvals.min() >= -PHYSICAL_EIGENVALUE_TOL:
            eigvals = np.clip(eigvals, 0, None)
            rho = (eigvecs * (eigvals / eigvals.sum())) @ eigvecs.conj().T
            log_l = _log_likelihood(counts, exposures, settings.probabilities(rho))

            return TomographyResult(rho_hat=DensityMatrix.from_array(rho),
                                    log_likelihood=log_l,
                                    iterations=0,
                                    converged=True,
                                    likelihood_history=(log_l,) if track_likelihood else None)

    projectors = settings.projectors
    h_inv = scipy.linalg.inv(np.einsum('i,iab->ab', exposures, projectors))
    identity = np.eye(DIM)

    rho = identity / DIM
    probs = settings.probabilities(rho)
    log_l = _log_likelihood(counts, exposures, probs)
    history = [log_l] if track_likelihood else None

    converged = False
    iteration = 0
    for iteration in range(1, max_iter + 1):

        # settings with zero counts give no weight, whatever their probability
        weights = np.divide(counts, probs, out=np.zeros_like(counts), where=counts > 0)
        m = h_inv @ np.einsum('i,iab->ab', weights, projectors)

        eps = None
        step = m
        while True:
            candidate = step @ rho @ step.conj().T
            candidate = (candidate + candidate.conj().T) / 2
            candidate /= np.trace(candidate).real

            cand_probs = settings.probabilities(candidate)
            cand_log_l = _log_likelihood(counts, exposures, cand_probs)

            if cand_log_l >= log_l:
                break

            eps = 1.0 if eps is None else eps / 2
            if eps < 2 ** -_MAX_DILUTIONS:
                candidate = None
                break
            step = identity + eps * m

        if candidate is None:
            # no ascent direction left at machine precision
            converged = True
            break

        change = np.max(np.abs(candidate - rho))
        rho, probs, log_l = candidate, cand_probs, cand_log_l

        if track_likelihood:
            history.append(log_l)

        if change < tol:
            converged = True
            break

    if not converged:
        warnings.warn(f"Maximum-likelihood reconstruction did not converge in {max_iter} iterations, "
                      f"returning the last iterate", ConvergenceWarning)

    return TomographyResult(rho_hat=DensityMatrix.from_array(rho),
                            log_likelihood=log_l,
                            iterations=iteration,
                            converged=converged,
                            likelihood_history=tuple(history) if track_likelihood else None)


def linear_inversion(records: Sequence[CountRecord],
                     settings: TomographySettings = DEFAULT_SETTINGS) -> np.ndarray:
    """
    Unconstrained estimate solving Tr(X Pi_i) = f_i for the count rates f_i, normalized to unit trace.

    The result is Hermitian but may have negative eigenvalues, so a plain array is returned rather than
    a DensityMatrix
    """
    counts, exposures = aggregate_records(records, len(settings))
    if counts.sum() <= 0:
        raise ReconstructionError("All counts are zero, nothing to reconstruct")

    return _linear_estimate(counts, exposures, settings)


def _linear_estimate(counts: np.ndarray, exposures: np.ndarray, settings: TomographySettings) -> np.ndarray:
    rates = counts / exposures

    # a[i, k] = Tr(lambda_k Pi_i)
    a = np.einsum('kab,iba->ik', LAMBDA_BASIS.stacked, settings.projectors)
    coeffs = scipy.linalg.solve(a, rates.astype(complex))

    x = np.einsum('k,kab->ab', coeffs, LAMBDA_BASIS.stacked)
    x = (x + x.conj().T) / 2
    return x / np.trace(x).real
