"""Read a Wigner grid as a candidate state at a different Planck constant.

Given samples ``W(x, p)`` and a trial value ``hbar'``, the position kernel

    K(x + y/2, x - y/2) = integral W(x, p) exp(i p y / hbar') dp

is the unique self-adjoint operator whose Wigner function at ``hbar'`` is
``W``. It is a density operator exactly when ``K dx`` (the discrete
trace-class surrogate) is positive semidefinite with unit trace.

Reconstruction details: kernel entries with ``a - b`` odd sit at half-node
centres ``x``, which are obtained by spectral interpolation of ``W`` along
``x``. The momentum sum is periodic in ``y`` with period ``2 pi hbar'/dp``;
offsets outside the principal half-period are set to zero, since for a state
supported inside the grid they correspond to correlations between points
beyond the box.
"""

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import matcore
from .errors import HermiticityViolation, PointOutOfBox, PurityCrossCheckMismatch
from .wignergrid import purity_from_grid

VERDICT_TOL = 1e-8
HERMITICITY_TOL = 1e-8
PURITY_CROSS_TOL = 1e-5
PURE_TOL = 1e-6
FINITE_SAMPLE_TOL = 1e-9
MAX_SAMPLE_POINTS = 64


class StateLabel(str, enum.Enum):
    PURE = "Pure"
    MIXED = "Mixed"
    NOT_A_STATE = "NotAState"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class OperatorKernel:
    """Position representation ``k[a, b] = <x_a| rho |x_b>`` on ``grid``."""

    grid: object
    k: np.ndarray
    hbar_prime: float

    @property
    def matrix(self):
        """``K dx``, the finite-dimensional operator whose spectrum is reported."""
        return self.k * self.grid.dx


@dataclass(frozen=True)
class OperatorSpectrum:
    eigenvalues: np.ndarray
    trace: float


@dataclass(frozen=True)
class StateVerdict:
    hbar_prime: float
    trace: float
    min_eigenvalue: float
    purity: float
    label: StateLabel
    eigenvalues: tuple = field(repr=False, default=())
    purity_phase_space: float = float("nan")

    @property
    def is_state(self):
        return self.label is not StateLabel.NOT_A_STATE

    def as_dict(self, top=8):
        return {
            "label": str(self.label),
            "hbar_prime": self.hbar_prime,
            "trace": self.trace,
            "min_eigenvalue": self.min_eigenvalue,
            "purity": self.purity,
            "purity_phase_space": self.purity_phase_space,
            "top_eigenvalues": list(self.eigenvalues[:top]),
        }


@dataclass(frozen=True)
class HbarScanReport:
    """Verdicts ordered by ``hbar'`` plus the label changes between neighbours.

    ``below_reference`` lists, for every scanned ``hbar'`` smaller than the
    grid's own ``hbar``, whether the reconstructed operator was positive. It
    is evidence about how states respond to a smaller Planck constant and
    carries no pass/fail meaning.
    """

    verdicts: tuple
    transitions: tuple
    reference_hbar: float
    below_reference: tuple = ()

    def labels(self):
        return [v.label for v in self.verdicts]


def _half_node_rows(w):
    # W at x_j + dx/2 via the Fourier shift theorem along x; Nyquist term dropped
    n = w.shape[0]
    freq = np.fft.fftfreq(n) * n
    shift = np.exp(1j * np.pi * freq / n)
    shift[n // 2] = 0.0
    return np.fft.ifft(np.fft.fft(w, axis=0) * shift[:, None], axis=0).real


def _raw_kernel(w, hbar_prime):
    # Hermitian by construction for real W; the caller's residual check guards the arithmetic
    grid = w.xgrid
    n, dx, dp = grid.N, grid.dx, w.dp
    fine = np.empty((2 * n - 1, n))
    fine[0::2] = w.w
    fine[1::2] = _half_node_rows(w.w)[:-1]
    offsets = np.arange(-(n - 1), n)
    kernel = np.exp(1j * np.outer(w.pvalues, offsets * dx) / hbar_prime) * dp
    table = fine @ kernel
    a = np.arange(n)[:, None]
    b = np.arange(n)[None, :]
    k = table[a + b, a - b + n - 1]
    # correlations beyond half the momentum period alias onto shorter ones
    k[np.abs((a - b) * dx) >= np.pi * hbar_prime / dp] = 0.0
    return k


def reconstruct_kernel(w, hbar_prime, herm_tol=HERMITICITY_TOL):
    """Position kernel of the operator whose Wigner function at ``hbar_prime`` is ``w``.

    Parameters
    ----------
    w : WignerGrid
    hbar_prime : float
        Trial Planck constant.
    herm_tol : float
        Allowed Hermiticity residual, relative to ``max |K|``.

    Returns
    -------
    OperatorKernel
    """
    if not (np.isfinite(hbar_prime) and hbar_prime > 0):
        raise ValueError(f"hbar_prime must be positive, got {hbar_prime!r}")
    k = _raw_kernel(w, hbar_prime)
    scale = max(np.abs(k).max(), np.finfo(float).tiny)
    residual = np.abs(k - k.conj().T).max()
    if residual > herm_tol * scale:
        raise HermiticityViolation(f"kernel Hermiticity residual {residual:.3e} exceeds tolerance")
    k = 0.5 * (k + k.conj().T)
    return OperatorKernel(w.xgrid, k, float(hbar_prime))


def operator_spectrum(kernel):
    """Eigenvalues (descending) and trace of ``K dx``."""
    mat = kernel.matrix
    spec = matcore.eig_hermitian(matcore.HermitianMatrix(mat.real, mat.imag))
    trace = float(np.trace(mat).real)
    return OperatorSpectrum(spec.eigenvalues[::-1].copy(), trace)


def verify_state(w, hbar_prime, tol=VERDICT_TOL, purity_tol=PURITY_CROSS_TOL):
    """Decide whether ``w`` is the Wigner function of a density operator at ``hbar_prime``.

    The operator is ``NotAState`` if its smallest eigenvalue is below
    ``-tol * max(1, |trace|)``, ``Pure`` if it is positive with purity at
    least ``1 - 1e-6``, and ``Mixed`` otherwise. Purity is computed from the
    spectrum and, independently, as ``2 pi hbar' * integral W^2``; the two
    must agree within ``purity_tol``.
    """
    spec = operator_spectrum(reconstruct_kernel(w, hbar_prime))
    ev = spec.eigenvalues
    purity = float(np.sum(ev**2))
    purity_ps = purity_from_grid(w, hbar_prime)
    if abs(purity - purity_ps) > purity_tol:
        raise PurityCrossCheckMismatch(
            f"spectral purity {purity:.9g} vs phase-space purity {purity_ps:.9g} at hbar'={hbar_prime:g}"
        )
    min_ev = float(ev[-1])
    if min_ev < -tol * max(1.0, abs(spec.trace)):
        label = StateLabel.NOT_A_STATE
    elif purity >= 1.0 - PURE_TOL:
        label = StateLabel.PURE
    else:
        label = StateLabel.MIXED
    return StateVerdict(
        hbar_prime=float(hbar_prime),
        trace=spec.trace,
        min_eigenvalue=min_ev,
        purity=purity,
        label=label,
        eigenvalues=tuple(float(v) for v in ev),
        purity_phase_space=purity_ps,
    )


def find_transitions(hbar_values, labels):
    out = []
    for i in range(1, len(labels)):
        if labels[i] != labels[i - 1]:
            out.append({
                "from": str(labels[i - 1]),
                "to": str(labels[i]),
                "hbar_before": float(hbar_values[i - 1]),
                "hbar_after": float(hbar_values[i]),
            })
    return tuple(out)


def _check_ascending(hbar_values):
    vals = [float(v) for v in hbar_values]
    if any(not (np.isfinite(v) and v > 0) for v in vals):
        raise ValueError("hbar values must be positive")
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise ValueError("hbar values must be strictly ascending")
    return vals


def scan_hbar(w, hbar_values, tol=VERDICT_TOL, workers=1):
    """Run :func:`verify_state` over ascending ``hbar_values``."""
    vals = _check_ascending(hbar_values)
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            verdicts = list(pool.map(lambda h: verify_state(w, h, tol), vals))
    else:
        verdicts = [verify_state(w, h, tol) for h in vals]
    below = tuple(
        {"hbar_prime": v.hbar_prime, "positive": v.is_state}
        for v in verdicts
        if v.hbar_prime < w.hbar
    )
    return HbarScanReport(
        verdicts=tuple(verdicts),
        transitions=find_transitions(vals, [v.label for v in verdicts]),
        reference_hbar=w.hbar,
        below_reference=below,
    )


def _check_points(w, points):
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) == 0 or len(pts) > MAX_SAMPLE_POINTS:
        raise ValueError(f"need between 1 and {MAX_SAMPLE_POINTS} points, got {len(pts)}")
    xs, ps = w.xvalues, w.pvalues
    inside = (
        (pts[:, 0] >= xs[0]) & (pts[:, 0] <= xs[-1])
        & (pts[:, 1] >= ps[0]) & (pts[:, 1] <= ps[-1])
    )
    if not np.all(inside):
        bad = pts[~inside][0]
        raise PointOutOfBox(f"point ({bad[0]:g}, {bad[1]:g}) lies outside the grid box")
    return pts


def symplectic_fourier(w, points, hbar_prime):
    """``integral W(z) exp(i sigma(z0, z) / hbar') dz`` at each ``z0 = (x0, p0)``.

    ``sigma(z, z') = p x' - x p'``. Evaluated as a Riemann sum over the grid.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    ux = np.exp(1j * np.outer(pts[:, 1], w.xvalues) / hbar_prime)
    vp = np.exp(-1j * np.outer(pts[:, 0], w.pvalues) / hbar_prime)
    return np.einsum("sj,jk,sk->s", ux, w.w, vp) * w.dx * w.dp


def finite_sample_matrix(w, hbar_prime, points):
    """``M_jk = F(z_j - z_k) exp(i sigma(z_j, z_k) / (2 hbar'))`` for the given points."""
    pts = _check_points(w, points)
    diff = (pts[:, None, :] - pts[None, :, :]).reshape(-1, 2)
    f = symplectic_fourier(w, diff, hbar_prime).reshape(len(pts), len(pts))
    sig = np.outer(pts[:, 1], pts[:, 0]) - np.outer(pts[:, 0], pts[:, 1])
    m = f * np.exp(0.5j * sig / hbar_prime)
    return 0.5 * (m + m.conj().T)


def klm_finite_sample(w, hbar_prime, points, tol=FINITE_SAMPLE_TOL):
    """Finite-subset necessary condition for ``w`` to be a state at ``hbar_prime``.

    A genuine state gives a positive semidefinite :func:`finite_sample_matrix`
    for every point set, so ``False`` proves ``w`` is not a state; ``True``
    proves nothing on its own.
    """
    m = finite_sample_matrix(w, hbar_prime, points)
    spec = matcore.eig_hermitian(matcore.HermitianMatrix(m.real, m.imag))
    return matcore.is_psd(spec, scale=float(np.trace(m).real), tol=tol)


def _candidate_sets(w, hbar_prime, seed, random_sets):
    unit = np.sqrt(hbar_prime)
    cross = np.array([[0.0, 0.0], [1, 0], [-1, 0], [0, 1], [0, -1]])
    ring = np.array([[np.cos(t), np.sin(t)] for t in np.linspace(0, 2 * np.pi, 8, endpoint=False)])
    for s in (0.25, 0.5, 1.0, 1.5, 2.0, 3.0):
        yield cross * s * unit
        yield np.vstack([[0.0, 0.0], ring * s * unit])
    rng = np.random.default_rng(seed)
    for _ in range(random_sets):
        yield rng.uniform(-2.0, 2.0, size=(12, 2)) * unit


def find_klm_witness(w, hbar_prime, seed=0, random_sets=32, tol=FINITE_SAMPLE_TOL):
    """Search crosses, rings and seeded random clusters for a violating point set.

    Returns the first set for which :func:`klm_finite_sample` fails, or
    ``None``.
    """
    for pts in _candidate_sets(w, hbar_prime, seed, random_sets):
        try:
            if not klm_finite_sample(w, hbar_prime, pts, tol):
                return pts
        except PointOutOfBox:
            continue
    return None
