"""Symplectic form, Williamson spectrum and random symplectic matrices.

Phase-space coordinates are ordered ``(x_1, ..., x_n, p_1, ..., p_n)`` so the
standard form is ``J = [[0, I], [-I, 0]]``.
"""

import numpy as np

from . import matcore
from .errors import CrossCheckMismatch, NotSPD, OddDimension, ZeroModes

DEGENERACY_RTOL = 1e-12
CROSS_CHECK_RTOL = 1e-10


def standard_J(n):
    """The ``2n x 2n`` standard symplectic matrix ``[[0, I], [-I, 0]]``."""
    n = int(n)
    if n < 1:
        raise ZeroModes("need at least one mode")
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def _validate_covariance(sigma):
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise NotSPD(f"covariance must be square, got shape {sigma.shape}")
    if sigma.shape[0] % 2:
        raise OddDimension(f"covariance dimension {sigma.shape[0]} is odd")
    if sigma.shape[0] == 0:
        raise ZeroModes("empty covariance matrix")
    try:
        spec = matcore.eig_symmetric(sigma, vectors=False)
    except matcore.NotSymmetric as exc:
        raise NotSPD(str(exc)) from exc
    trace = float(np.trace(sigma))
    if trace <= 0.0 or spec.min <= DEGENERACY_RTOL * trace:
        raise NotSPD(f"covariance is not positive definite (min eigenvalue {spec.min:.3e})")
    return 0.5 * (sigma + sigma.T)


def _via_hermitian(sigma, J):
    # i * (S^1/2 J S^1/2) is Hermitian with eigenvalues +-lambda_j
    root = matcore.sqrt_spd(sigma)
    a = root @ J @ root
    a = 0.5 * (a - a.T)
    spec = matcore.eig_hermitian(matcore.HermitianMatrix(np.zeros_like(a), a))
    n = sigma.shape[0] // 2
    return np.sort(spec.eigenvalues[n:])


def _via_squared(sigma, J):
    # -(J S)^2 is similar to L^T J^T S J L, whose eigenvalues are lambda_j^2 (doubled)
    low = matcore.cholesky(sigma)
    b = low.T @ (J.T @ sigma @ J) @ low
    w = matcore.eig_symmetric(0.5 * (b + b.T), vectors=False).eigenvalues
    w = np.sqrt(np.clip(w, 0.0, None))
    return 0.5 * (w[0::2] + w[1::2])


def symplectic_eigenvalues(sigma, rtol=CROSS_CHECK_RTOL):
    """Symplectic eigenvalues of a covariance matrix, ascending.

    Two independent routes are computed and must agree within
    ``rtol * ||sigma||_2``: the Hermitian spectrum of ``i S^1/2 J S^1/2`` and
    the square roots of the spectrum of ``-(J S)^2`` (via a Cholesky
    similarity transform).

    Parameters
    ----------
    sigma : array_like
        Symmetric positive-definite ``2n x 2n`` matrix.

    Returns
    -------
    ndarray
        ``n`` strictly positive values ``lambda_1 <= ... <= lambda_n``.

    Raises
    ------
    NotSPD, OddDimension, CrossCheckMismatch
    """
    sigma = _validate_covariance(sigma)
    J = standard_J(sigma.shape[0] // 2)
    first = _via_hermitian(sigma, J)
    second = _via_squared(sigma, J)
    norm = matcore.eig_symmetric(sigma, vectors=False).max
    gap = np.abs(first - second).max()
    if gap > rtol * norm:
        raise CrossCheckMismatch(
            f"symplectic eigenvalue routes disagree by {gap:.3e} (limit {rtol * norm:.3e})"
        )
    return first


def _embed_mode_block(n, j, block):
    s = np.eye(2 * n)
    idx = [j, n + j]
    s[np.ix_(idx, idx)] = block
    return s


def random_symplectic(n, seed=None, max_squeeze=0.5, max_shear=0.5, layers=2):
    """Random symplectic matrix built from exact generators.

    Each layer applies, per mode, a phase rotation, a squeeze
    ``diag(e^-r, e^r)`` and a momentum shear ``p -> p + c x``, followed by a
    passive rotation mixing every pair of modes and a symmetric multimode
    shear ``[[I, 0], [C, I]]``.
    """
    n = int(n)
    if n < 1:
        raise ZeroModes("need at least one mode")
    rng = np.random.default_rng(seed)
    s = np.eye(2 * n)
    for _ in range(layers):
        for j in range(n):
            phi = rng.uniform(0.0, 2.0 * np.pi)
            c, si = np.cos(phi), np.sin(phi)
            s = _embed_mode_block(n, j, np.array([[c, si], [-si, c]])) @ s
            r = rng.uniform(-max_squeeze, max_squeeze)
            s = _embed_mode_block(n, j, np.diag([np.exp(-r), np.exp(r)])) @ s
            t = rng.uniform(-max_shear, max_shear)
            s = _embed_mode_block(n, j, np.array([[1.0, 0.0], [t, 1.0]])) @ s
        for j in range(n):
            for k in range(j + 1, n):
                theta = rng.uniform(0.0, 2.0 * np.pi)
                rot = np.eye(n)
                rot[j, j] = rot[k, k] = np.cos(theta)
                rot[j, k], rot[k, j] = np.sin(theta), -np.sin(theta)
                s = np.block([[rot, np.zeros((n, n))], [np.zeros((n, n)), rot]]) @ s
        shear = rng.uniform(-max_shear, max_shear, size=(n, n))
        shear = 0.5 * (shear + shear.T)
        s = np.block([[np.eye(n), np.zeros((n, n))], [shear, np.eye(n)]]) @ s
    return s
