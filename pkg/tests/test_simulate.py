import numpy as np
import pytest

from lagcoh.errors import ShapeMismatch
from lagcoh.measures import lagged_from_spectra, lagged_measures
from lagcoh.regression import constrained_fit, unconstrained_fit
from lagcoh.simulate import (
    GenerativeModel,
    generate_spectral,
    generate_var,
    population_covariances,
    population_sdd,
    population_spectra,
    random_hpd,
    random_mixing,
    transfer_C,
)
from lagcoh.spectra import cross_spectra, dft_epochs


def interior_lag_a(x, y):
    xs, ys = dft_epochs(x), dft_epochs(y)
    freqs = range(1, x.n_samples // 2)
    return np.array([lagged_from_spectra(cs).lagA for cs in cross_spectra(xs, ys, freqs)])


class TestModel:
    def test_defaults(self):
        m = GenerativeModel([[1.0, 2.0]])
        assert (m.p, m.q, m.order) == (2, 1, 0)
        np.testing.assert_array_equal(m.noise_cov, np.eye(1))
        np.testing.assert_array_equal(m.x_cov, np.eye(2))

    def test_bad_lag_shape(self):
        with pytest.raises(ShapeMismatch):
            GenerativeModel([[1.0, 2.0]], D_lags=[[[1.0]]])

    def test_bad_noise(self):
        with pytest.raises(ShapeMismatch):
            GenerativeModel([[1.0]], noise_cov=[[-1.0]])


class TestGenerateVar:
    def test_shapes_and_labels(self):
        m = GenerativeModel(np.ones((2, 3)), [np.ones((2, 3))], n_samples=10)
        x, y = generate_var(m, 4, seed=1)
        assert x.data.shape == (4, 10, 3) and y.data.shape == (4, 10, 2)
        assert y.channel_labels == ["y0", "y1"]

    def test_reproducible_and_epochwise(self):
        m = GenerativeModel([[0.5]], [[[0.3]], [[0.2]]], n_samples=12)
        x1, y1 = generate_var(m, 6, seed=9)
        x2, y2 = generate_var(m, 6, seed=9)
        x3, _ = generate_var(m, 3, seed=9)
        np.testing.assert_array_equal(y1.data, y2.data)
        np.testing.assert_array_equal(x1.data[:3], x3.data)
        _, y4 = generate_var(m, 6, seed=10)
        assert not np.allclose(y1.data, y4.data)

    def test_lags_follow_the_recursion(self):
        b, d1 = 0.7, -1.3
        m = GenerativeModel([[b]], [[[d1]]], noise_cov=[[0.0]], n_samples=20)
        x, y = generate_var(m, 2, seed=3)
        xe, ye = x.data[:, :, 0], y.data[:, :, 0]
        np.testing.assert_allclose(ye[:, 1:], b * xe[:, 1:] + d1 * xe[:, :-1], atol=1e-13)

    def test_null_model_has_small_lagged_coherence(self):
        m = GenerativeModel([[0.0]], n_samples=16)
        x, y = generate_var(m, 500, seed=5)
        xs, ys = dft_epochs(x), dft_epochs(y)
        lag_c = [lagged_from_spectra(cs).lagC for cs in cross_spectra(xs, ys, range(1, 8))]
        assert np.mean(lag_c) <= 0.05

    def test_output_variance(self):
        m = GenerativeModel([[1.0]], noise_cov=[[1.0]], n_samples=100)
        x, y = generate_var(m, 1000, seed=2)
        assert np.var(y.data) == pytest.approx(np.var(x.data) + 1.0, rel=0.10)

    def test_sample_level_b_invariance(self):
        # the real fit absorbs B exactly, so the same draws give the same lagA
        rng = np.random.default_rng(4)
        m0 = GenerativeModel(np.zeros((2, 2)), [rng.standard_normal((2, 2))], n_samples=16)
        m1 = m0.with_B(10 * rng.standard_normal((2, 2)))
        a0 = interior_lag_a(*generate_var(m0, 60, seed=8))
        a1 = interior_lag_a(*generate_var(m1, 60, seed=8))
        np.testing.assert_allclose(a1, a0, rtol=1e-6)


class TestTransfer:
    def test_no_lags(self):
        assert np.all(transfer_C(GenerativeModel([[1.0]]), 3) == 0)

    def test_dc_is_sum_of_lags(self):
        m = GenerativeModel([[0.0]], [[[0.5]], [[-2.0]]])
        np.testing.assert_allclose(transfer_C(m, 0), [[-1.5]], atol=1e-15)

    def test_quarter_frequency(self):
        m = GenerativeModel(np.zeros((2, 2)), [np.eye(2)], n_samples=16)
        np.testing.assert_allclose(transfer_C(m, 4), -1j * np.eye(2), atol=1e-15)


def random_setup(rng, p, q, m=2, n_samples=32):
    model = GenerativeModel(
        rng.standard_normal((q, p)),
        [rng.standard_normal((q, p)) for _ in range(m)],
        n_samples=n_samples,
    )
    return model, random_hpd(p, rng), random_hpd(q, rng)


class TestPopulation:
    def test_no_coupling(self, rng):
        m = GenerativeModel(np.zeros((2, 3)))
        s_eps = random_hpd(2, rng)
        syy, syx = population_covariances(m, random_hpd(3, rng), s_eps, 5)
        np.testing.assert_allclose(syy, s_eps)
        assert np.all(syx == 0)

    def test_instantaneous_only_with_real_sxx(self, rng):
        m = GenerativeModel(rng.standard_normal((2, 3)))
        sxx = random_hpd(3, rng).real
        syy, _ = population_covariances(m, sxx, np.eye(2), 5)
        assert np.abs(syy.imag).max() < 1e-14
        np.testing.assert_allclose(syy, syy.T)

    def test_unconstrained_recovers_transfer(self, rng):
        for _ in range(20):
            model, sxx, s_eps = random_setup(rng, 3, 2)
            a1, s = unconstrained_fit(population_spectra(model, sxx, s_eps, 5))
            np.testing.assert_allclose(a1, model.B + transfer_C(model, 5), atol=1e-9)
            np.testing.assert_allclose(s, s_eps, atol=1e-9)

    def test_sdd_without_lags(self, rng):
        m = GenerativeModel(rng.standard_normal((2, 2)))
        s_eps = random_hpd(2, rng)
        s_delta, d = population_sdd(m, random_hpd(2, rng), s_eps, 3)
        np.testing.assert_allclose(s_delta, s_eps, atol=1e-12)
        assert np.all(d == 0)

    def test_sdd_real_transfer_and_real_sxx(self, rng):
        # lag at the Nyquist bin gives a real C
        m = GenerativeModel(np.zeros((2, 2)), [rng.standard_normal((2, 2))], n_samples=8)
        c = transfer_C(m, 4)
        assert np.abs(c.imag).max() < 1e-15
        s_eps = random_hpd(2, rng)
        s_delta, d = population_sdd(m, random_hpd(2, rng).real, s_eps, 4)
        np.testing.assert_allclose(d, c.real, atol=1e-12)
        np.testing.assert_allclose(s_delta, s_eps, atol=1e-10)

    @pytest.mark.parametrize("p,q", [(1, 1), (2, 3), (3, 2)])
    def test_sdd_closed_form_matches_fit(self, rng, p, q):
        for omega in (1, 3, 7):
            model, sxx, s_eps = random_setup(rng, p, q)
            s_delta, _ = population_sdd(model, sxx, s_eps, omega)
            _, fitted = constrained_fit(population_spectra(model, sxx, s_eps, omega))
            np.testing.assert_allclose(s_delta, fitted, rtol=1e-10, atol=1e-10 * np.abs(fitted).max())
            w = np.linalg.eigvalsh(s_delta - s_eps)
            assert w[0] >= -1e-10 * np.abs(s_delta).max()

    def test_lag_a_does_not_depend_on_b(self, rng):
        model, sxx, s_eps = random_setup(rng, 2, 2)
        ref = lagged_from_spectra(population_spectra(model, sxx, s_eps, 5)).lagA
        for _ in range(30):
            b = 10 * rng.standard_normal((2, 2))
            got = lagged_from_spectra(population_spectra(model.with_B(b), sxx, s_eps, 5)).lagA
            assert got == pytest.approx(ref, rel=1e-8)


class TestSpectralSampling:
    def test_empirical_covariances_converge(self):
        rng = np.random.default_rng(12)
        model, sxx, s_eps = random_setup(rng, 2, 2, n_samples=32)
        xs, ys = generate_spectral(model, 3, sxx, s_eps, 10_000, seed=1)
        (cs,) = cross_spectra(xs, ys, [3])
        syy, syx = population_covariances(model, sxx, s_eps, 3)
        for emp, pop in ((cs.sxx, sxx), (cs.syy, syy), (cs.syx, syx)):
            assert np.linalg.norm(emp - pop) <= 0.05 * np.linalg.norm(pop)

    def test_lagged_coherence_converges(self):
        rng = np.random.default_rng(13)
        model = GenerativeModel([[1.5]], [[[0.8]]], n_samples=16)
        sxx, s_eps = np.array([[2.0]]), np.array([[1.0]])
        s_delta, _ = population_sdd(model, sxx, s_eps, 3)
        target = lagged_measures(s_eps, s_delta).lagC
        xs, ys = generate_spectral(model, 3, sxx, s_eps, 5000, seed=rng.integers(1 << 31))
        (cs,) = cross_spectra(xs, ys, [3])
        assert lagged_from_spectra(cs).lagC == pytest.approx(target, abs=0.03)


class TestRandomMixing:
    def test_scalar(self):
        m = random_mixing(1, seed=3)
        assert m.shape == (1, 1) and m[0, 0] != 0

    @pytest.mark.parametrize("dim", [2, 3, 6])
    def test_invertible(self, dim):
        m = random_mixing(dim, seed=dim)
        np.testing.assert_allclose(m @ np.linalg.inv(m), np.eye(dim), atol=1e-8)
        s = np.linalg.svd(m, compute_uv=False)
        assert s[-1] / s[0] >= 1e-6

    def test_identity_mode(self):
        np.testing.assert_array_equal(random_mixing(3, identity=True), np.eye(3))

    def test_reproducible(self):
        np.testing.assert_array_equal(random_mixing(4, seed=5), random_mixing(4, seed=5))
