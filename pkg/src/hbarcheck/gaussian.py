"""Analytic Gaussian phase-space states and their classification in hbar'.

A Gaussian with covariance ``sigma`` is the Wigner function of a density
operator at Planck constant ``hbar'`` exactly when
``sigma + (i hbar'/2) J`` is positive semidefinite, i.e. when its smallest
symplectic eigenvalue is at least ``hbar'/2``. Shrinking ``hbar'`` below the
saturating value turns a pure state into a mixed one; growing it leaves only
a classical probability density.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from . import matcore
from .errors import DimensionMismatch, NonPositiveWidth, NotAQuantumState
from .symplectic import _validate_covariance, standard_J, symplectic_eigenvalues

PURE_RTOL = 1e-9
RSI_RTOL = 1e-12


class GaussianLabel(str, enum.Enum):
    QUANTUM_PURE = "QuantumPure"
    QUANTUM_MIXED = "QuantumMixed"
    CLASSICAL_ONLY = "ClassicalOnly"
    INVALID = "Invalid"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class GaussianState:
    """Phase-space Gaussian with mean ``mean`` and covariance ``sigma``.

    ``hbar_ref`` records the Planck constant the state was prepared with; it
    does not enter any of the checks, which all take ``hbar_prime``
    explicitly.
    """

    sigma: np.ndarray
    mean: np.ndarray = None
    hbar_ref: float = 1.0

    def __post_init__(self):
        sigma = _validate_covariance(self.sigma)
        dim = sigma.shape[0]
        mean = np.zeros(dim) if self.mean is None else np.asarray(self.mean, dtype=float).reshape(-1)
        if mean.shape != (dim,):
            raise DimensionMismatch(f"mean has length {mean.size}, covariance is {dim}x{dim}")
        if not np.all(np.isfinite(mean)):
            raise DimensionMismatch("mean has non-finite entries")
        if not self.hbar_ref > 0:
            raise ValueError("hbar_ref must be positive")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "hbar_ref", float(self.hbar_ref))

    @property
    def n(self):
        return self.sigma.shape[0] // 2

    @property
    def sigma_xx(self):
        return self.sigma[: self.n, : self.n]

    @property
    def sigma_xp(self):
        return self.sigma[: self.n, self.n:]

    @property
    def sigma_pp(self):
        return self.sigma[self.n:, self.n:]

    @classmethod
    def coherent(cls, sigma_x, hbar=1.0, mean=None):
        """Minimum-uncertainty state with position spread ``sigma_x``."""
        if sigma_x <= 0:
            raise NonPositiveWidth("sigma_x must be positive")
        sigma_p = hbar / (2.0 * sigma_x)
        return cls(np.diag([sigma_x**2, sigma_p**2]), mean, hbar)


@dataclass(frozen=True)
class GaussianVerdict:
    label: GaussianLabel
    lambda_min: float
    hbar_critical: float
    rsi_satisfied: tuple = field(default_factory=tuple)
    saturated: bool = False
    hbar_prime: float = float("nan")
    symplectic_eigenvalues: tuple = field(default_factory=tuple)

    def as_dict(self):
        return {
            "label": str(self.label),
            "hbar_prime": self.hbar_prime,
            "lambda_min": self.lambda_min,
            "hbar_critical": self.hbar_critical,
            "symplectic_eigenvalues": list(self.symplectic_eigenvalues),
            "rsi_satisfied": list(self.rsi_satisfied),
            "saturated": self.saturated,
        }


def _check_hbar(hbar_prime):
    if not (np.isfinite(hbar_prime) and hbar_prime > 0):
        raise ValueError(f"hbar_prime must be a positive real, got {hbar_prime!r}")


def gaussian_wigner(state, z):
    """Normalized Gaussian density of ``state`` at phase-space point(s) ``z``.

    ``z`` may have shape ``(2n,)`` or ``(..., 2n)``.
    """
    z = np.asarray(z, dtype=float)
    dim = 2 * state.n
    if z.shape[-1] != dim:
        raise DimensionMismatch(f"points must have trailing dimension {dim}, got {z.shape}")
    d = z - state.mean
    inv = np.linalg.inv(state.sigma)
    quad = np.einsum("...i,ij,...j->...", d, inv, d)
    norm = (2.0 * np.pi) ** (-state.n) / np.sqrt(matcore.det(state.sigma))
    return norm * np.exp(-0.5 * quad)


def coherent_wavefunction(sigma_x, x):
    """Real Gaussian wavefunction whose position density has variance ``sigma_x**2``."""
    if not sigma_x > 0:
        raise NonPositiveWidth(f"sigma_x must be positive, got {sigma_x!r}")
    x = np.asarray(x, dtype=float)
    return (2.0 * np.pi * sigma_x**2) ** -0.25 * np.exp(-(x**2) / (4.0 * sigma_x**2))


def klm_matrix(state, hbar_prime):
    """``sigma + (i hbar'/2) J`` as a :class:`HermitianMatrix`."""
    return matcore.HermitianMatrix(state.sigma, 0.5 * hbar_prime * standard_J(state.n))


def klm_check(state, hbar_prime, tol=matcore.PSD_TOL):
    """Whether ``sigma + (i hbar'/2) J`` is positive semidefinite."""
    _check_hbar(hbar_prime)
    spec = matcore.eig_hermitian(klm_matrix(state, hbar_prime))
    return matcore.is_psd(spec, scale=float(np.trace(state.sigma)), tol=tol)


def rsi_check(state, hbar_prime, rtol=RSI_RTOL):
    """Per-mode Robertson-Schroedinger inequalities.

    Mode ``j`` passes when
    ``var(x_j) var(p_j) >= cov(x_j, p_j)**2 + hbar'**2 / 4``
    up to a relative band ``rtol``.
    """
    _check_hbar(hbar_prime)
    vx = np.diag(state.sigma_xx)
    vp = np.diag(state.sigma_pp)
    cxp = np.diag(state.sigma_xp)
    lhs = vx * vp
    rhs = cxp**2 + 0.25 * hbar_prime**2
    band = rtol * np.maximum(lhs, rhs)
    return tuple(bool(v) for v in lhs >= rhs - band)


def critical_hbar(state):
    """Largest ``hbar'`` at which the Gaussian is still a quantum state: ``2 lambda_min``."""
    return 2.0 * float(symplectic_eigenvalues(state.sigma)[0])


def classify_gaussian(state, hbar_prime, rtol=PURE_RTOL):
    """Classify a Gaussian at Planck constant ``hbar_prime``.

    Returns
    -------
    GaussianVerdict
        ``QuantumPure`` when every symplectic eigenvalue equals ``hbar'/2``
        within ``rtol * hbar'``; ``QuantumMixed`` when the smallest is above
        that; ``ClassicalOnly`` when it falls below.
    """
    _check_hbar(hbar_prime)
    lam = symplectic_eigenvalues(state.sigma)
    half = 0.5 * hbar_prime
    band = rtol * hbar_prime
    saturated = bool(np.abs(lam - half).max() <= band)
    if saturated:
        label = GaussianLabel.QUANTUM_PURE
    elif lam[0] >= half - band:
        label = GaussianLabel.QUANTUM_MIXED
    else:
        label = GaussianLabel.CLASSICAL_ONLY
    return GaussianVerdict(
        label=label,
        lambda_min=float(lam[0]),
        hbar_critical=2.0 * float(lam[0]),
        rsi_satisfied=rsi_check(state, hbar_prime),
        saturated=saturated,
        hbar_prime=float(hbar_prime),
        symplectic_eigenvalues=tuple(float(v) for v in lam),
    )


def gaussian_purity(state, hbar_prime):
    """``tr(rho^2) = (hbar'/2)^n / sqrt(det sigma)`` for a valid state at ``hbar'``."""
    _check_hbar(hbar_prime)
    if not klm_check(state, hbar_prime):
        raise NotAQuantumState(
            f"covariance violates the uncertainty condition at hbar'={hbar_prime:g}"
        )
    return float((0.5 * hbar_prime) ** state.n / np.sqrt(matcore.det(state.sigma)))


__all__ = [
    "GaussianLabel",
    "GaussianState",
    "GaussianVerdict",
    "classify_gaussian",
    "coherent_wavefunction",
    "critical_hbar",
    "gaussian_purity",
    "gaussian_wigner",
    "klm_check",
    "klm_matrix",
    "rsi_check",
]
