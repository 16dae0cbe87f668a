"""One-mode wavefunctions and Wigner functions on uniform grids.

Conventions
-----------
Positions are ``x_j = -L + j dx`` with ``dx = 2L/N``. The Wigner integral
is sampled at offsets ``y_m = 2 m dx`` so that ``x_j +- y_m/2`` are grid
nodes, and the momentum lattice is FFT-conjugate to that offset lattice::

    dp = 2 pi hbar / (2 N dx),    p_k = k dp,   k = -N/2, ..., N/2 - 1

With this choice the discrete transform reproduces ``|psi|^2`` exactly as
the position marginal, has unit total mass, and its momentum marginal equals
``|phi(p_k)|^2`` up to aliasing of momenta beyond ``+-pi hbar / (2 dx)``.
The Wigner values carry the ``1/(2 pi hbar)`` prefactor, so that
``sum(w) dx dp = 1``.
"""

from dataclasses import dataclass
from math import factorial

import numpy as np
from scipy.special import eval_hermite

from .errors import EdgeLeakage, GridMismatch, MassDeficit, NotNormalized

EDGE_TOL = 1e-10
NORM_TOL = 1e-8
IMAG_TOL = 1e-12
MASS_TOL = 1e-6
WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class PositionGrid:
    """``N`` uniform points on ``[-L, L)``."""

    L: float
    N: int

    def __post_init__(self):
        if not (np.isfinite(self.L) and self.L > 0):
            raise ValueError(f"half-width L must be positive, got {self.L!r}")
        n = int(self.N)
        if n != self.N or n < 16 or n & (n - 1):
            raise ValueError(f"N must be a power of two >= 16, got {self.N!r}")
        object.__setattr__(self, "L", float(self.L))
        object.__setattr__(self, "N", n)

    @property
    def dx(self):
        return 2.0 * self.L / self.N

    @property
    def points(self):
        return -self.L + self.dx * np.arange(self.N)


def momentum_lattice(grid, hbar):
    """Momentum points and spacing conjugate to the ``2 dx`` offset lattice."""
    dp = 2.0 * np.pi * hbar / (2.0 * grid.N * grid.dx)
    return dp * np.arange(-grid.N // 2, grid.N // 2), dp


@dataclass(frozen=True)
class GridWavefunction:
    grid: PositionGrid
    values: np.ndarray
    hbar: float = 1.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex).reshape(-1)
        if values.shape != (self.grid.N,):
            raise GridMismatch(f"expected {self.grid.N} samples, got {values.size}")
        if not np.all(np.isfinite(values)):
            raise ValueError("wavefunction has non-finite samples")
        if not self.hbar > 0:
            raise ValueError("hbar must be positive")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "hbar", float(self.hbar))

    @classmethod
    def from_samples(cls, grid, values, hbar=1.0):
        """Build and normalize so that ``sum |psi|^2 dx = 1``."""
        values = np.asarray(values, dtype=complex)
        norm = np.sqrt(np.sum(np.abs(values) ** 2) * grid.dx)
        if norm == 0.0:
            raise NotNormalized("wavefunction is identically zero")
        return cls(grid, values / norm, hbar)

    @property
    def norm2(self):
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.dx)

    @property
    def edge_magnitude(self):
        return float(max(abs(self.values[0]), abs(self.values[-1])))

    def check(self, edge_tol=EDGE_TOL, norm_tol=NORM_TOL):
        if abs(self.norm2 - 1.0) > norm_tol:
            raise NotNormalized(f"sum |psi|^2 dx = {self.norm2:.12g}, expected 1")
        edge = self.edge_magnitude
        if edge > edge_tol:
            raise EdgeLeakage(
                f"wavefunction does not decay at the grid edges (|psi| = {edge:.3e} > {edge_tol:g})",
                magnitude=edge,
            )


@dataclass(frozen=True)
class WignerGrid:
    """Samples ``w[j, k] = W(x_j, p_k)``; ``hbar`` is the constant used to build it."""

    xgrid: PositionGrid
    pvalues: np.ndarray
    w: np.ndarray
    hbar: float

    def __post_init__(self):
        n = self.xgrid.N
        p = np.asarray(self.pvalues, dtype=float).reshape(-1)
        w = np.asarray(self.w)
        if np.iscomplexobj(w):
            raise ValueError("Wigner samples must be real")
        w = w.astype(float)
        if p.shape != (n,) or w.shape != (n, n):
            raise GridMismatch(f"expected {n} momenta and a {n}x{n} array, got {p.shape}, {w.shape}")
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(p))):
            raise ValueError("Wigner grid has non-finite values")
        steps = np.diff(p)
        if np.any(steps <= 0) or np.abs(steps - steps.mean()).max() > 1e-9 * abs(steps.mean()):
            raise GridMismatch("momentum values must be uniform and ascending")
        if not self.hbar > 0:
            raise ValueError("hbar must be positive")
        object.__setattr__(self, "pvalues", p)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "hbar", float(self.hbar))

    @property
    def xvalues(self):
        return self.xgrid.points

    @property
    def dx(self):
        return self.xgrid.dx

    @property
    def dp(self):
        return float((self.pvalues[-1] - self.pvalues[0]) / (len(self.pvalues) - 1))

    @property
    def mass(self):
        return float(self.w.sum() * self.dx * self.dp)

    def __add__(self, other):
        _same_lattice(self, other)
        return WignerGrid(self.xgrid, self.pvalues, self.w + other.w, self.hbar)

    def scaled(self, factor):
        return WignerGrid(self.xgrid, self.pvalues, factor * self.w, self.hbar)


def _same_lattice(a, b):
    if a.xgrid != b.xgrid or a.hbar != b.hbar or not np.array_equal(a.pvalues, b.pvalues):
        raise GridMismatch("Wigner grids live on different lattices")


@dataclass(frozen=True)
class MixtureEnsemble:
    """Convex combination ``sum_j weight_j |psi_j><psi_j|``."""

    components: tuple

    def __post_init__(self):
        comps = tuple((float(wt), psi) for wt, psi in self.components)
        if not comps:
            raise ValueError("mixture needs at least one component")
        weights = np.array([wt for wt, _ in comps])
        if np.any(weights < 0):
            raise ValueError("mixture weights must be non-negative")
        if abs(weights.sum() - 1.0) > WEIGHT_TOL:
            raise ValueError(f"mixture weights sum to {weights.sum():.15g}, expected 1")
        first = comps[0][1]
        for _, psi in comps:
            if psi.grid != first.grid or psi.hbar != first.hbar:
                raise GridMismatch("mixture components must share grid and hbar")
            if abs(psi.norm2 - 1.0) > NORM_TOL:
                raise NotNormalized("mixture component is not normalized")
        object.__setattr__(self, "components", comps)


def _correlation_indices(n):
    j = np.arange(n)[:, None]
    m = np.arange(-n // 2, n // 2)[None, :]
    plus, minus = j + m, j - m
    valid = (plus >= 0) & (plus < n) & (minus >= 0) & (minus < n)
    return np.clip(plus, 0, n - 1), np.clip(minus, 0, n - 1), valid, m[0] % n


def wigner_transform(psi, edge_tol=EDGE_TOL, norm_tol=NORM_TOL, imag_tol=IMAG_TOL):
    """FFT Wigner transform of a one-mode grid wavefunction.

    For each ``x_j`` the correlation ``psi(x_j + m dx) psi*(x_j - m dx)``
    (zero once either node leaves the grid) is Fourier-summed over the
    offsets ``y_m = 2 m dx`` with kernel ``exp(-i p y / hbar)``.

    Raises
    ------
    EdgeLeakage, NotNormalized
        When ``psi`` fails its normalization or edge-decay invariants.
    ArithmeticError
        When the imaginary residual exceeds ``imag_tol * max|W|``.
    """
    psi.check(edge_tol, norm_tol)
    grid = psi.grid
    n = grid.N
    plus, minus, valid, cols = _correlation_indices(n)
    corr = np.where(valid, psi.values[plus] * np.conj(psi.values[minus]), 0.0)
    ordered = np.zeros((n, n), dtype=complex)
    ordered[:, cols] = corr
    spectrum = np.fft.fftshift(np.fft.fft(ordered, axis=1), axes=1)
    w = (2.0 * grid.dx / (2.0 * np.pi * psi.hbar)) * spectrum
    residual = np.abs(w.imag).max()
    if residual > imag_tol * max(1.0, np.abs(w.real).max()):
        raise ArithmeticError(f"Wigner transform has imaginary residual {residual:.3e}")
    p, _ = momentum_lattice(grid, psi.hbar)
    return WignerGrid(grid, p, w.real, psi.hbar)


def mixture_wigner(ens):
    """Weighted sum of the component Wigner functions."""
    total = None
    for weight, psi in ens.components:
        part = wigner_transform(psi).scaled(weight)
        total = part if total is None else total + part
    return total


def sample_wigner(func, grid, hbar=1.0):
    """Evaluate ``func(x, p)`` (broadcasting) on the lattice conjugate to ``grid``."""
    p, _ = momentum_lattice(grid, hbar)
    w = func(grid.points[:, None], p[None, :])
    return WignerGrid(grid, p, np.asarray(w, dtype=float), hbar)


def gaussian_wigner_grid(state, grid, hbar=None):
    """Sample a one-mode :class:`~hbarcheck.gaussian.GaussianState` onto a grid."""
    from .gaussian import gaussian_wigner

    if state.n != 1:
        raise GridMismatch("grid sampling supports one mode only")
    hbar = state.hbar_ref if hbar is None else hbar

    def func(x, p):
        z = np.stack(np.broadcast_arrays(x, p), axis=-1)
        return gaussian_wigner(state, z)

    return sample_wigner(func, grid, hbar)


def momentum_wavefunction(psi):
    """``phi(p_k) = (2 pi hbar)^-1/2 sum_j exp(-i p_k x_j / hbar) psi_j dx`` by direct DFT."""
    p, _ = momentum_lattice(psi.grid, psi.hbar)
    x = psi.grid.points
    kernel = np.exp(-1j * np.outer(p, x) / psi.hbar)
    return kernel @ psi.values * psi.grid.dx / np.sqrt(2.0 * np.pi * psi.hbar)


def marginals(w):
    """Position and momentum densities ``(sum_k w dp, sum_j w dx)``."""
    return w.w.sum(axis=1) * w.dp, w.w.sum(axis=0) * w.dx


def covariance_from_grid(w, mass_tol=MASS_TOL):
    """Mean ``(x, p)`` and symmetrized 2x2 covariance from Riemann-sum moments."""
    mass = w.mass
    if abs(mass - 1.0) > mass_tol:
        raise MassDeficit(f"total mass {mass:.10g} differs from 1 by more than {mass_tol:g}")
    cell = w.dx * w.dp
    x = w.xvalues[:, None]
    p = w.pvalues[None, :]
    mean = np.array([np.sum(x * w.w), np.sum(p * w.w)]) * cell
    dxv = x - mean[0]
    dpv = p - mean[1]
    sxx = np.sum(dxv**2 * w.w) * cell
    spp = np.sum(dpv**2 * w.w) * cell
    sxp = np.sum(dxv * dpv * w.w) * cell
    m = np.array([[sxx, sxp], [sxp, spp]])
    return mean, 0.5 * (m + m.T)


def purity_from_grid(w, hbar_prime):
    """``2 pi hbar' * integral W^2``, the purity of ``W`` read as a state at ``hbar'``."""
    return float(2.0 * np.pi * hbar_prime * np.sum(w.w**2) * w.dx * w.dp)


def hermite_wavefunction(k, sigma_x, grid, hbar=1.0, edge_tol=EDGE_TOL):
    """``k``-th oscillator eigenfunction whose ground state has position spread ``sigma_x``."""
    k = int(k)
    if not 0 <= k <= 8:
        raise ValueError(f"Hermite index must be in 0..8, got {k}")
    if not sigma_x > 0:
        raise ValueError("sigma_x must be positive")
    x = grid.points
    u = x / (np.sqrt(2.0) * sigma_x)
    pref = (2.0**k * factorial(k)) ** -0.5 * (2.0 * np.pi * sigma_x**2) ** -0.25
    psi = GridWavefunction.from_samples(grid, pref * eval_hermite(k, u) * np.exp(-0.5 * u**2), hbar)
    if psi.edge_magnitude > edge_tol:
        raise EdgeLeakage(
            f"grid too narrow for Hermite-{k} (edge |psi| = {psi.edge_magnitude:.3e})",
            magnitude=psi.edge_magnitude,
        )
    return psi
