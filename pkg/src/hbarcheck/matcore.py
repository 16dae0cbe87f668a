"""Dense eigensolvers, positivity tests and SPD matrix functions.

Real matrices are plain 2-d ``numpy`` float arrays. Hermitian matrices are
carried as a ``(re, im)`` pair and solved through the real-symmetric
embedding ``[[re, -im], [im, re]]`` so that a single symmetric solver serves
both cases.

The symmetric solver is a cyclic Jacobi iteration for matrices up to
``JACOBI_MAX_DIM``; larger matrices (the grid operator kernels) go to LAPACK.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    NoConvergence,
    NotHermitian,
    NotPositiveDefinite,
    NotSquare,
    NotSymmetric,
)

JACOBI_MAX_DIM = 64
SYMMETRY_RTOL = 1e-12
PSD_TOL = 1e-10


@dataclass(frozen=True)
class HermitianMatrix:
    """Complex Hermitian matrix ``re + 1j * im``."""

    re: np.ndarray
    im: np.ndarray

    def __post_init__(self):
        re = np.asarray(self.re, dtype=float)
        im = np.asarray(self.im, dtype=float)
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)
        if re.ndim != 2 or re.shape[0] != re.shape[1] or re.shape != im.shape:
            raise NotSquare(f"re/im must be square and of equal shape, got {re.shape} and {im.shape}")
        if not (np.all(np.isfinite(re)) and np.all(np.isfinite(im))):
            raise NotHermitian("matrix has non-finite entries")
        scale = max(1.0, np.abs(re).max(initial=0.0), np.abs(im).max(initial=0.0))
        if np.abs(re - re.T).max(initial=0.0) > SYMMETRY_RTOL * scale:
            raise NotHermitian("real part is not symmetric")
        if np.abs(im + im.T).max(initial=0.0) > SYMMETRY_RTOL * scale:
            raise NotHermitian("imaginary part is not antisymmetric")

    @classmethod
    def from_complex(cls, h):
        h = np.asarray(h, dtype=complex)
        return cls(h.real.copy(), h.imag.copy())

    @property
    def dim(self):
        return self.re.shape[0]

    def to_complex(self):
        return self.re + 1j * self.im

    def embedding(self):
        """Real symmetric matrix of twice the dimension with the same spectrum (doubled)."""
        return np.block([[self.re, -self.im], [self.im, self.re]])


@dataclass(frozen=True)
class SpectrumResult:
    """Eigenvalues in ascending order, optionally with orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: Optional[np.ndarray] = None

    @property
    def min(self):
        return float(self.eigenvalues[0])

    @property
    def max(self):
        return float(self.eigenvalues[-1])


def _as_square(m):
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise NotSquare(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def _check_symmetric(m, rtol=SYMMETRY_RTOL):
    scale = max(np.abs(m).max(), np.finfo(float).tiny)
    if np.abs(m - m.T).max() > rtol * scale:
        raise NotSymmetric("matrix is not symmetric")


def jacobi_eigh(m, tol=1e-15, max_sweeps=60):
    """Cyclic Jacobi eigenvalue iteration for a real symmetric matrix.

    Parameters
    ----------
    m : ndarray
        Symmetric ``(n, n)`` array.
    tol : float
        Sweeps stop once the off-diagonal Frobenius norm drops below
        ``tol * ||m||_F``.
    max_sweeps : int
        Raises :class:`NoConvergence` when exceeded.

    Returns
    -------
    (ndarray, ndarray)
        Unsorted eigenvalues and the matching eigenvector columns.
    """
    a = np.array(m, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    norm = np.linalg.norm(a)
    if n == 1 or norm == 0.0:
        return np.diag(a).copy(), v
    target = tol * norm
    # round-robin ordering: each round rotates n/2 disjoint (p, q) pairs at once;
    # index n is a dummy partner when n is odd
    slots = list(range(n + (n % 2)))
    half = len(slots) // 2
    for _ in range(max_sweeps):
        off = np.sqrt(2.0 * np.sum(np.triu(a, 1) ** 2))
        if off <= target:
            return np.diag(a).copy(), v
        for _ in range(len(slots) - 1):
            top = np.array(slots[:half])
            bottom = np.array(slots[half:][::-1])
            keep = (top < n) & (bottom < n)
            p = np.minimum(top, bottom)[keep]
            q = np.maximum(top, bottom)[keep]
            slots = [slots[0], slots[-1]] + slots[1:-1]
            apq = a[p, q]
            active = np.abs(apq) > 1e-300
            if not np.any(active):
                continue
            p, q, apq = p[active], q[active], apq[active]
            theta = (a[q, q] - a[p, p]) / (2.0 * apq)
            big = np.abs(theta) > 1e150
            safe = np.where(big, 1.0, theta)
            sign = np.where(safe >= 0.0, 1.0, -1.0)
            t = np.where(big, 0.5 / np.where(big, theta, 1.0), sign / (np.abs(safe) + np.sqrt(safe * safe + 1.0)))
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            g = np.eye(n)
            g[p, p] = c
            g[q, q] = c
            g[p, q] = s
            g[q, p] = -s
            a = g.T @ a @ g
            a = 0.5 * (a + a.T)
            a[p, q] = a[q, p] = 0.0
            v = v @ g
    raise NoConvergence(f"Jacobi iteration did not converge in {max_sweeps} sweeps")


def eig_symmetric(m, vectors=True, method="auto"):
    """Eigen-decomposition of a real symmetric matrix.

    Parameters
    ----------
    m : array_like
        Square matrix, symmetric to ``1e-12`` relative.
    vectors : bool
        Whether to return eigenvectors.
    method : {"auto", "jacobi", "lapack"}
        ``"auto"`` uses Jacobi up to ``JACOBI_MAX_DIM`` and LAPACK above.

    Returns
    -------
    SpectrumResult
    """
    m = _as_square(m)
    _check_symmetric(m)
    m = 0.5 * (m + m.T)
    if method == "auto":
        method = "jacobi" if m.shape[0] <= JACOBI_MAX_DIM else "lapack"
    if method == "jacobi":
        w, v = jacobi_eigh(m)
        order = np.argsort(w, kind="stable")
        w, v = w[order], v[:, order]
    elif method == "lapack":
        if vectors:
            w, v = np.linalg.eigh(m)
        else:
            w, v = np.linalg.eigvalsh(m), None
    else:
        raise ValueError(f"unknown method {method!r}")
    return SpectrumResult(w, v if vectors else None)


def _pair_vectors(w2, v2, n, tol):
    """Recover complex eigenvectors from the doubled real embedding.

    Each real eigenvector ``(u, v)`` maps to the complex vector ``u + iv``.
    Inside every cluster of (numerically) equal eigenvalues the complex
    images span the eigenspace twice over, so an SVD keeps the leading half.
    """
    c = v2[:n, :] + 1j * v2[n:, :]
    out = np.empty((n, n), dtype=complex)
    col = 0
    start = 0
    while start < 2 * n:
        stop = start + 1
        while stop < 2 * n and w2[stop] - w2[stop - 1] <= tol:
            stop += 1
        size = stop - start
        u, _, _ = np.linalg.svd(c[:, start:stop], full_matrices=False)
        keep = size // 2
        out[:, col:col + keep] = u[:, :keep]
        col += keep
        start = stop
    if col != n:
        raise NoConvergence("could not pair embedded eigenvectors")
    return out


def eig_hermitian(h, vectors=False, method="auto"):
    """Eigenvalues of a Hermitian matrix via its real-symmetric embedding.

    The embedding has every eigenvalue of ``h`` twice; consecutive pairs of
    the sorted embedded spectrum are averaged.

    Parameters
    ----------
    h : HermitianMatrix or complex array_like
    vectors : bool
        Also return complex eigenvectors (columns).

    Returns
    -------
    SpectrumResult
    """
    if not isinstance(h, HermitianMatrix):
        h = HermitianMatrix.from_complex(h)
    n = h.dim
    spec = eig_symmetric(h.embedding(), vectors=vectors, method=method)
    w2 = spec.eigenvalues
    scale = max(1.0, np.abs(w2).max(initial=0.0))
    lo, hi = w2[0::2], w2[1::2]
    if np.abs(hi - lo).max(initial=0.0) > 1e-8 * scale:
        raise NoConvergence("embedded eigenvalues failed to pair up")
    w = 0.5 * (lo + hi)
    vecs = None
    if vectors:
        vecs = _pair_vectors(w2, spec.eigenvectors, n, 1e-9 * scale)
    return SpectrumResult(w, vecs)


def is_psd(spectrum, scale=1.0, tol=PSD_TOL):
    """True when the smallest eigenvalue is at least ``-tol * max(1, scale)``."""
    return bool(spectrum.min >= -tol * max(1.0, scale))


def sqrt_spd(m, tol=1e-14):
    """Symmetric square root of a symmetric positive-definite matrix."""
    spec = eig_symmetric(m)
    w, v = spec.eigenvalues, spec.eigenvectors
    if w[0] <= tol * max(1.0, abs(w[-1])):
        raise NotPositiveDefinite(f"matrix is not positive definite (min eigenvalue {w[0]:.3e})")
    r = (v * np.sqrt(w)) @ v.T
    return 0.5 * (r + r.T)


def cholesky(m):
    """Lower Cholesky factor; raises :class:`NotPositiveDefinite` on failure."""
    m = _as_square(m)
    _check_symmetric(m)
    try:
        return np.linalg.cholesky(0.5 * (m + m.T))
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from exc


def det(m):
    """Determinant by LU factorization with partial pivoting."""
    a = _as_square(m).copy()
    n = a.shape[0]
    sign = 1.0
    for k in range(n):
        piv = k + int(np.argmax(np.abs(a[k:, k])))
        if a[piv, k] == 0.0:
            return 0.0
        if piv != k:
            a[[k, piv]] = a[[piv, k]]
            sign = -sign
        a[k + 1:, k] /= a[k, k]
        a[k + 1:, k + 1:] -= np.outer(a[k + 1:, k], a[k, k + 1:])
    return float(sign * np.prod(np.diag(a)))
