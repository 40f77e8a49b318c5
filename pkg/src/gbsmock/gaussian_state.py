"""Gaussian covariance matrices for threshold-detector boson sampling.

The experiment is described by a complex transformation matrix T (N output
modes by K input modes, sub-unitary because it absorbs photon loss) and K/2
real squeezing parameters.  The output state is fully characterized by a
2N x 2N Hermitian covariance matrix ``sigma`` in the doubled basis where
mode j occupies rows j and j + N.  Vacuum corresponds to sigma == identity,
so the no-click probability is 1/sqrt(det sigma).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import ConditioningError, DimensionError, DomainError

_HERMITICITY_TOL = 1e-10
_EIGENVALUE_TOL = 1e-9
_SINGULAR_VALUE_TOL = 1e-8


@dataclass(frozen=True)
class GBSInstance:
    """Interferometer description: transformation matrix plus squeezing.

    ``transformation`` has shape (n_output, n_input); ``squeezing`` holds
    the n_input / 2 non-negative squeezing parameters.
    """

    n_output: int
    n_input: int
    squeezing: np.ndarray
    transformation: np.ndarray

    def __post_init__(self):
        squeezing = np.asarray(self.squeezing, dtype=float)
        transformation = np.asarray(self.transformation, dtype=complex)
        object.__setattr__(self, "squeezing", squeezing)
        object.__setattr__(self, "transformation", transformation)

        if self.n_output < 1:
            raise DomainError("n_output must be positive")
        if self.n_input < 2 or self.n_input % 2 != 0:
            raise DomainError("n_input must be a positive even integer")
        if squeezing.shape != (self.n_input // 2,):
            raise DimensionError(
                f"expected {self.n_input // 2} squeezing parameters, "
                f"got {squeezing.shape}"
            )
        if not np.all(np.isfinite(squeezing)) or np.any(squeezing < 0):
            raise DomainError("squeezing parameters must be finite and >= 0")
        if transformation.shape != (self.n_output, self.n_input):
            raise DimensionError(
                f"transformation must be {self.n_output} x {self.n_input}, "
                f"got {transformation.shape}"
            )
        if not np.all(np.isfinite(transformation)):
            raise DomainError("transformation entries must be finite")

        smax = np.linalg.svd(transformation, compute_uv=False).max()
        if smax > 1.0 + _SINGULAR_VALUE_TOL:
            raise DomainError(
                f"transformation is not sub-unitary: max singular value {smax:.6g}"
            )
        if smax > 1.0:
            warnings.warn(
                f"transformation max singular value {smax:.17g} slightly above 1; "
                "accepting as round-off",
                stacklevel=2,
            )


@dataclass(frozen=True)
class GaussianState:
    """Immutable Gaussian state with cached inverse and log-determinant."""

    n_modes: int
    sigma: np.ndarray
    log_det: float = field(init=False)
    inverse: np.ndarray = field(init=False)

    def __post_init__(self):
        sigma = np.asarray(self.sigma, dtype=complex)
        object.__setattr__(self, "sigma", sigma)
        n = self.n_modes
        if sigma.shape != (2 * n, 2 * n):
            raise DimensionError(f"sigma must be {2 * n} x {2 * n}, got {sigma.shape}")
        _validate_sigma(sigma, n)

        try:
            factor = scipy.linalg.cho_factor(sigma, lower=True)
        except scipy.linalg.LinAlgError as exc:
            raise ConditioningError(f"sigma is not positive definite: {exc}") from exc
        log_det = 2.0 * float(np.sum(np.log(np.real(np.diag(factor[0])))))
        if log_det < -_EIGENVALUE_TOL:
            raise ConditioningError(
                f"det(sigma) = exp({log_det:.3g}) < 1; state is unphysical"
            )
        inverse = scipy.linalg.cho_solve(factor, np.eye(2 * n, dtype=complex))
        inverse.setflags(write=False)
        sigma.setflags(write=False)
        object.__setattr__(self, "log_det", log_det)
        object.__setattr__(self, "inverse", inverse)

    def vacuum_probability(self) -> float:
        """Probability of the all-zeros click pattern, 1/sqrt(det sigma)."""
        return float(np.exp(-0.5 * self.log_det))


def _validate_sigma(sigma: np.ndarray, n: int) -> None:
    if np.max(np.abs(sigma - sigma.conj().T)) > _HERMITICITY_TOL:
        raise ConditioningError("sigma is not Hermitian within tolerance")
    if (
        np.max(np.abs(sigma[n:, n:] - sigma[:n, :n].conj())) > _HERMITICITY_TOL
        or np.max(np.abs(sigma[n:, :n] - sigma[:n, n:].conj())) > _HERMITICITY_TOL
    ):
        raise ConditioningError("sigma lacks the conjugate block structure")
    eigmin = scipy.linalg.eigvalsh(sigma).min()
    if eigmin < 0.5 - _EIGENVALUE_TOL:
        raise ConditioningError(
            f"sigma - I/2 not positive semidefinite (min eigenvalue {eigmin:.3g})"
        )


def build_input_covariance(squeezing, n_input: int) -> np.ndarray:
    """Covariance of the squeezed-vacuum input, a 2K x 2K real matrix.

    The squeezing matrix has block layout [Ch | Sh; Sh | Ch] with 2x2
    diagonal blocks cosh(r_k) I and sinh(r_k) I placed block-diagonally.
    """
    squeezing = np.asarray(squeezing, dtype=float)
    if n_input < 2 or n_input % 2 != 0:
        raise DimensionError("n_input must be a positive even integer")
    if squeezing.shape != (n_input // 2,):
        raise DimensionError(
            f"expected {n_input // 2} squeezing parameters, got {squeezing.shape}"
        )
    if not np.all(np.isfinite(squeezing)) or np.any(squeezing < 0):
        raise DomainError("squeezing parameters must be finite and >= 0")

    # Each r_k covers two consecutive input modes.
    per_mode = np.repeat(squeezing, 2)
    ch = np.diag(np.cosh(per_mode))
    sh = np.diag(np.sinh(per_mode))
    squeeze = np.block([[ch, sh], [sh, ch]])
    return 0.5 * (squeeze @ squeeze.T)


def build_output_covariance(instance: GBSInstance) -> GaussianState:
    """Output covariance sigma = I - (1/2) D D^dag + D sigma_in D^dag."""
    t = instance.transformation
    n = instance.n_output
    sigma_in = build_input_covariance(instance.squeezing, instance.n_input)
    d = scipy.linalg.block_diag(t, t.conj())
    sigma = np.eye(2 * n, dtype=complex) - 0.5 * (d @ d.conj().T) + d @ sigma_in @ d.conj().T
    # Symmetrize round-off before the invariant checks.
    sigma = 0.5 * (sigma + sigma.conj().T)
    return GaussianState(n_modes=n, sigma=sigma)


def reduce_state(state: GaussianState, modes) -> GaussianState:
    """Partial trace onto ``modes``: keep rows/columns j and j + N."""
    modes = list(modes)
    n = state.n_modes
    if len(set(modes)) != len(modes):
        raise IndexError(f"duplicate mode indices in {modes}")
    for j in modes:
        if not 0 <= j < n:
            raise IndexError(f"mode index {j} out of range for {n} modes")
    idx = np.array(modes + [j + n for j in modes], dtype=int)
    sigma_r = state.sigma[np.ix_(idx, idx)]
    return GaussianState(n_modes=len(modes), sigma=sigma_r)
