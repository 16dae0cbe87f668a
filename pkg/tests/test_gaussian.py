import numpy as np
import pytest
from scipy import integrate

from hbarcheck.errors import DimensionMismatch, NonPositiveWidth, NotAQuantumState, NotSPD
from hbarcheck.gaussian import (
    GaussianLabel,
    GaussianState,
    classify_gaussian,
    coherent_wavefunction,
    critical_hbar,
    gaussian_purity,
    gaussian_wigner,
    klm_check,
    rsi_check,
)
from hbarcheck.symplectic import random_symplectic

from conftest import random_spd

COHERENT = GaussianState(np.diag([0.5, 0.5]))


def williamson_state(rng, n, hbar=1.0, excess=1.0):
    """Random valid covariance: S^T diag(nu, nu) S with every nu >= hbar/2."""
    nu = 0.5 * hbar + rng.uniform(0.0, excess, size=n)
    s = random_symplectic(n, seed=int(rng.integers(2**32)))
    return GaussianState(s.T @ np.diag(np.concatenate([nu, nu])) @ s)


class TestGaussianState:
    def test_blocks(self):
        sigma = np.array([
            [2.0, 0.1, 0.3, 0.0],
            [0.1, 3.0, 0.0, 0.4],
            [0.3, 0.0, 5.0, 0.2],
            [0.0, 0.4, 0.2, 7.0],
        ])
        st = GaussianState(sigma)
        assert st.n == 2
        assert np.array_equal(st.sigma_xx, sigma[:2, :2])
        assert np.array_equal(st.sigma_xp, sigma[:2, 2:])
        assert np.array_equal(st.sigma_pp, sigma[2:, 2:])

    def test_rejects_singular(self):
        with pytest.raises(NotSPD):
            GaussianState(np.diag([1.0, 0.0]))

    def test_rejects_bad_mean(self):
        with pytest.raises(DimensionMismatch):
            GaussianState(np.eye(2), mean=[0.0, 0.0, 0.0])


class TestGaussianWigner:
    def test_eq6_peak(self):
        sx, sp = 0.6, 0.9
        st = GaussianState(np.diag([sx**2, sp**2]))
        assert gaussian_wigner(st, [0.0, 0.0]) == pytest.approx(1.0 / (2 * np.pi * sx * sp), rel=1e-14)

    def test_value_at_mean(self, rng):
        for n in (1, 2, 3):
            sigma = random_spd(rng, 2 * n)
            mean = rng.normal(size=2 * n)
            st = GaussianState(sigma, mean)
            expected = (2 * np.pi) ** (-n) / np.sqrt(np.linalg.det(sigma))
            assert gaussian_wigner(st, mean) == pytest.approx(expected, rel=1e-12)

    def test_normalization_by_quadrature(self):
        st = GaussianState(np.array([[0.7, 0.2], [0.2, 0.4]]), mean=[0.3, -0.1])
        h = 0.02
        ax = np.arange(-12.0, 12.0 + h / 2, h)
        z = np.stack(np.meshgrid(ax, ax, indexing="ij"), axis=-1)
        total = integrate.trapezoid(integrate.trapezoid(gaussian_wigner(st, z), ax, axis=1), ax)
        assert abs(total - 1.0) <= 1e-8

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            gaussian_wigner(COHERENT, [0.0, 0.0, 0.0])


class TestCoherentWavefunction:
    def test_normalized(self):
        sx = np.sqrt(0.5)
        assert coherent_wavefunction(sx, 0.0) == pytest.approx(np.pi**-0.25, rel=1e-15)
        norm, _ = integrate.quad(lambda x: coherent_wavefunction(sx, x) ** 2, -np.inf, np.inf)
        assert abs(norm - 1.0) <= 1e-10

    def test_position_variance(self):
        sx = 1.3
        var, _ = integrate.quad(lambda x: x**2 * coherent_wavefunction(sx, x) ** 2, -np.inf, np.inf)
        assert var == pytest.approx(sx**2, rel=1e-10)

    def test_even(self):
        x = np.linspace(0, 5, 11)
        assert np.array_equal(coherent_wavefunction(0.7, x), coherent_wavefunction(0.7, -x))

    def test_rejects_width(self):
        with pytest.raises(NonPositiveWidth):
            coherent_wavefunction(0.0, 1.0)


class TestKlmAndRsi:
    @pytest.mark.parametrize("hbar, expected", [(1.0, True), (1.5, False), (0.5, True)])
    def test_coherent(self, hbar, expected):
        assert klm_check(COHERENT, hbar) is expected

    def test_rsi_saturated(self):
        st = COHERENT
        assert rsi_check(st, 1.0) == (True,)
        lhs = st.sigma[0, 0] * st.sigma[1, 1]
        assert lhs == st.sigma[0, 1] ** 2 + 0.25

    def test_rsi_violated(self):
        assert rsi_check(COHERENT, 1.2) == (False,)

    def test_klm_implies_rsi(self, rng):
        accepted = 0
        while accepted < 1000:
            n = int(rng.integers(1, 4))
            if rng.random() < 0.5:
                st = williamson_state(rng, n)
            else:
                st = GaussianState(random_spd(rng, 2 * n, floor=0.05))
            if klm_check(st, 1.0):
                accepted += 1
                assert all(rsi_check(st, 1.0))

    def test_klm_monotone(self, rng):
        grid = np.linspace(3.0, 0.05, 40)
        for _ in range(20):
            st = GaussianState(random_spd(rng, 2 * int(rng.integers(1, 4))))
            results = [klm_check(st, h) for h in grid]
            first = results.index(True) if True in results else len(results)
            assert all(results[first:])


class TestClassify:
    @pytest.mark.parametrize("hbar, label", [
        (1.0, GaussianLabel.QUANTUM_PURE),
        (0.5, GaussianLabel.QUANTUM_MIXED),
        (1.5, GaussianLabel.CLASSICAL_ONLY),
    ])
    def test_trichotomy(self, hbar, label):
        verdict = classify_gaussian(COHERENT, hbar)
        assert verdict.label is label
        assert verdict.hbar_critical == 2 * verdict.lambda_min
        assert verdict.saturated is (label is GaussianLabel.QUANTUM_PURE)

    def test_transition_at_critical(self, rng):
        for _ in range(20):
            st = GaussianState(random_spd(rng, 2 * int(rng.integers(1, 4))))
            hc = critical_hbar(st)
            below = classify_gaussian(st, hc * (1 - 1e-6)).label
            above = classify_gaussian(st, hc * (1 + 1e-6)).label
            assert below in (GaussianLabel.QUANTUM_PURE, GaussianLabel.QUANTUM_MIXED)
            assert above is GaussianLabel.CLASSICAL_ONLY

    def test_symplectic_invariance_of_label(self, rng):
        for _ in range(40):
            n = int(rng.integers(1, 4))
            st = GaussianState(random_spd(rng, 2 * n))
            s = random_symplectic(n, seed=int(rng.integers(2**32)))
            moved = GaussianState(s.T @ st.sigma @ s)
            for hbar in (0.3, 1.0, 2.5):
                assert classify_gaussian(st, hbar).label is classify_gaussian(moved, hbar).label

    def test_squeezed_pure_state(self):
        s = random_symplectic(2, seed=3)
        st = GaussianState(0.5 * s.T @ s)
        assert classify_gaussian(st, 1.0).label is GaussianLabel.QUANTUM_PURE


class TestCriticalHbar:
    def test_coherent(self):
        assert critical_hbar(COHERENT) == pytest.approx(1.0, abs=1e-14)

    def test_thermal(self):
        assert critical_hbar(GaussianState(np.diag([2.0, 2.0]))) == pytest.approx(4.0, abs=1e-13)

    def test_homogeneous(self, rng):
        st = GaussianState(random_spd(rng, 4))
        for c in (0.01, 3.0, 250.0):
            assert critical_hbar(GaussianState(c * st.sigma)) == pytest.approx(c * critical_hbar(st), rel=1e-10)


class TestPurity:
    def test_pure(self):
        assert gaussian_purity(COHERENT, 1.0) == pytest.approx(1.0, abs=1e-15)

    def test_half(self):
        assert gaussian_purity(COHERENT, 0.5) == pytest.approx(0.5, abs=1e-15)

    def test_two_modes(self):
        st = GaussianState(np.diag([0.5, 1.0, 0.5, 1.0]))
        assert gaussian_purity(st, 1.0) == pytest.approx(0.5, abs=1e-15)

    def test_product_formula(self, rng):
        for _ in range(20):
            st = williamson_state(rng, 3)
            from hbarcheck.symplectic import symplectic_eigenvalues
            lam = symplectic_eigenvalues(st.sigma)
            assert gaussian_purity(st, 1.0) == pytest.approx(np.prod(0.5 / lam), rel=1e-9)

    def test_requires_state(self):
        with pytest.raises(NotAQuantumState):
            gaussian_purity(COHERENT, 1.5)

    def test_at_critical(self, rng):
        s = random_symplectic(3, seed=7)
        degenerate = GaussianState(0.8 * s.T @ s)
        assert gaussian_purity(degenerate, critical_hbar(degenerate)) == pytest.approx(1.0, abs=1e-6)
        for _ in range(10):
            st = GaussianState(random_spd(rng, 4))
            assert gaussian_purity(st, critical_hbar(st) * (1 - 1e-12)) < 1.0

    def test_unit_iff_pure(self, rng):
        for _ in range(30):
            st = williamson_state(rng, int(rng.integers(1, 4)), excess=float(rng.choice([0.0, 0.3])))
            pure = classify_gaussian(st, 1.0).label is GaussianLabel.QUANTUM_PURE
            assert (abs(gaussian_purity(st, 1.0) - 1.0) <= 1e-9) is pure
