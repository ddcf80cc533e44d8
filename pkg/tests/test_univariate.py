"""Sphere, exit, H', wrapped Cauchy, von Mises and real Cauchy laws, and the KS test."""

import math

import numpy as np
import pytest

from brownexit.models import ExitParams, HPrimeParams, RealCauchyParams, VonMisesParams, WrappedCauchyParams
from brownexit.stats.mathcore import DomainError, beta_fn, quad_1d
from brownexit.stats import univariate as uv

TWO_PI = 2 * math.pi


def _angles(z):
    return np.mod(np.angle(z), TWO_PI)


class TestSphereAndExit:

    def test_uniform_sphere(self, stream):
        x = uv.uniform_sphere_sample(3, stream(1), 100_000)
        np.testing.assert_allclose(np.linalg.norm(x, axis=1), 1.0, atol=1e-12)
        se_mean = math.sqrt(1 / 3 / x.shape[0])
        assert np.all(np.abs(x.mean(axis=0)) < 4 * se_mean)
        second = x ** 2
        se_second = second.std(axis=0) / math.sqrt(x.shape[0])
        assert np.all(np.abs(second.mean(axis=0) - 1 / 3) < 4 * se_second)

    def test_uniform_sphere_rejects_small_d(self, stream):
        with pytest.raises(DomainError):
            uv.uniform_sphere_sample(1, stream())

    def test_exit_density_values(self):
        assert uv.exit_density(np.array([0.0, 0.0, 1.0]), ExitParams([0.0, 0.0, 0.0])) == pytest.approx(1 / (4 * math.pi))
        assert uv.exit_density(np.array([1.0, 0.0]), ExitParams([0.5, 0.0])) == pytest.approx(3 / TWO_PI)

    def test_exit_density_normalized_on_circle(self):
        p = ExitParams([0.7 * math.cos(1.0), 0.7 * math.sin(1.0)])
        value = quad_1d(lambda t: uv.exit_density(np.array([math.cos(t), math.sin(t)]), p), 0.0, TWO_PI).value
        assert value == pytest.approx(1.0, abs=1e-9)

    def test_exit_density_matches_wrapped_cauchy(self):
        theta = np.linspace(0, TWO_PI, 50, endpoint=False)
        x = np.column_stack([np.cos(theta), np.sin(theta)])
        exit_values = uv.exit_density(x, ExitParams([0.6, 0.0]))
        cauchy_values = uv.wrapped_cauchy_density(np.exp(1j * theta), WrappedCauchyParams(0.6))
        np.testing.assert_allclose(exit_values, cauchy_values, rtol=1e-12)

    def test_exit_pole_outside_ball(self):
        with pytest.raises(DomainError):
            ExitParams([1.0, 0.0])

    def test_exit_sample_circle_is_wrapped_cauchy(self, stream):
        x = uv.exit_sample(ExitParams([0.5, 0.0]), stream(2), size=5000)
        angles = np.mod(np.arctan2(x[:, 1], x[:, 0]), TWO_PI)
        result = uv.ks_test(angles, lambda t: uv.wrapped_cauchy_cdf(t, WrappedCauchyParams(0.5)))
        assert result.pvalue > 0.01

    def test_exit_sample_uniform_pole(self, stream):
        x = uv.exit_sample(ExitParams([0.0, 0.0]), stream(3), size=5000)
        angles = np.mod(np.arctan2(x[:, 1], x[:, 0]), TWO_PI)
        assert uv.ks_test(angles, lambda t: t / TWO_PI).pvalue > 0.01

    def test_exit_sample_mean_projection(self, stream):
        eta = np.array([0.0, 0.3, 0.4])
        x = uv.exit_sample(ExitParams(eta), stream(4), size=100_000)
        w = x @ (eta / np.linalg.norm(eta))
        assert abs(w.mean() - 0.5) < 4 * w.std() / math.sqrt(w.size)

    def test_single_draw_shape(self, stream):
        assert uv.exit_sample(ExitParams([0.1, 0.2, 0.0]), stream()).shape == (3,)


class TestHPrime:

    def test_symmetric_case(self):
        nu = 1.5
        x = np.linspace(-0.9, 0.9, 7)
        expected = (1 - x ** 2) ** (nu - 0.5) / beta_fn(nu + 0.5, 0.5)
        np.testing.assert_allclose(uv.hprime_density(x, HPrimeParams(0.0, nu)), expected, rtol=1e-12)

    @pytest.mark.parametrize("theta,nu", [(0.5, 1.0), (-0.3, 0.0), (0.8, 2.5)])
    def test_normalized(self, theta, nu):
        p = HPrimeParams(theta, nu)
        # x = -cos(s) removes the edge singularities
        total = quad_1d(lambda s: uv.hprime_density(-math.cos(s), p) * math.sin(s), 0.0, math.pi).value
        assert total == pytest.approx(1.0, abs=1e-8)

    def test_density_zero_at_edge(self):
        assert uv.hprime_density(1.0, HPrimeParams(0.2, 1.0)) == 0.0

    def test_density_outside_support(self):
        with pytest.raises(DomainError):
            uv.hprime_density(1.5, HPrimeParams(0.2, 1.0))

    def test_second_moment_formula(self):
        assert uv.hprime_second_moment(HPrimeParams(0.5, 0.5)) == pytest.approx(0.5)

    @pytest.mark.parametrize("theta,nu", [(0.5, 1.0), (-0.3, 0.0), (0.8, 2.5), (0.0, 0.5)])
    def test_mean_matches_quadrature(self, theta, nu):
        p = HPrimeParams(theta, nu)
        mean = quad_1d(lambda s: -math.cos(s) * uv.hprime_density(-math.cos(s), p) * math.sin(s), 0.0, math.pi).value
        assert uv.hprime_mean(p) == pytest.approx(mean, abs=1e-8)

    def test_invalid_params(self):
        with pytest.raises(DomainError):
            HPrimeParams(0.2, -0.5)
        with pytest.raises(DomainError):
            HPrimeParams(1.0, 1.0)

    def test_sample_moments(self, stream):
        p = HPrimeParams(0.7, 0.5)
        x = uv.hprime_sample(p, stream(5), 100_000)
        se = x.std() / math.sqrt(x.size)
        assert abs(x.mean() - 0.7) < 4 * se
        se2 = (x ** 2).std() / math.sqrt(x.size)
        assert abs((x ** 2).mean() - uv.hprime_second_moment(p)) < 4 * se2

    def test_symmetric_sample_mean(self, stream):
        x = uv.hprime_sample(HPrimeParams(0.0, 1.0), stream(6), 100_000)
        assert abs(x.mean()) < 4 * x.std() / math.sqrt(x.size)

    def test_sample_against_cdf(self, stream):
        p = HPrimeParams(0.4, 1.0)
        x = uv.hprime_sample(p, stream(7), 2000)
        assert uv.ks_test(x, lambda t: uv.hprime_cdf(t, p)).pvalue > 0.01

    def test_mle_recovers_theta(self, stream):
        x = uv.hprime_sample(HPrimeParams(0.6, 0.5), stream(8), 20_000)
        theta, at_boundary, score = uv.hprime_mle(x, 0.5)
        assert not at_boundary
        assert theta == pytest.approx(0.6, abs=0.02)
        assert abs(score) / x.size < 1e-6


class TestWrappedCauchy:

    def test_density_values(self):
        assert uv.wrapped_cauchy_density(1.0 + 0j, WrappedCauchyParams(0)) == pytest.approx(1 / TWO_PI)
        phi = 0.6 * np.exp(1j * math.pi / 3)
        mode = phi / abs(phi)
        assert uv.wrapped_cauchy_density(mode, WrappedCauchyParams(phi)) == pytest.approx(1.6 / (TWO_PI * 0.4))

    def test_density_normalized(self):
        p = WrappedCauchyParams(0.6 * np.exp(1j * math.pi / 3))
        total = quad_1d(lambda t: uv.wrapped_cauchy_density(np.exp(1j * t), p), 0.0, TWO_PI).value
        assert total == pytest.approx(1.0, abs=1e-9)

    def test_cdf_matches_density(self):
        p = WrappedCauchyParams(0.5 * np.exp(2j))
        for t in (0.5, 2.0, 4.0, 6.0):
            integral = quad_1d(lambda s: uv.wrapped_cauchy_density(np.exp(1j * s), p), 0.0, t).value
            assert uv.wrapped_cauchy_cdf(t, p) == pytest.approx(integral, abs=1e-9)
        assert uv.wrapped_cauchy_cdf(TWO_PI, p) == pytest.approx(1.0)

    def test_parameter_outside_disc(self):
        with pytest.raises(DomainError):
            WrappedCauchyParams(1.0)

    def test_mobius_identity_and_fixed_point(self):
        z = np.exp(1j * np.linspace(0, 6, 7))
        np.testing.assert_allclose(uv.mobius_unit(z, 0), z)
        assert uv.mobius_unit(1 + 0j, 0.4) == pytest.approx(1 + 0j)
        w = uv.mobius_unit(z, 0.3 - 0.2j)
        np.testing.assert_allclose(np.abs(w), 1.0, atol=1e-12)
        np.testing.assert_allclose(uv.mobius_unit_inverse(w, 0.3 - 0.2j), z, atol=1e-12)

    def test_mobius_pushes_uniform_to_wrapped_cauchy(self, stream):
        z = uv.mobius_unit(uv.circular_uniform_sample(stream(9), 5000), 0.5)
        assert uv.ks_test(_angles(z), lambda t: uv.wrapped_cauchy_cdf(t, WrappedCauchyParams(0.5))).pvalue > 0.01

    def test_sample_first_moment(self, stream):
        phi = 0.4 + 0.3j
        z = uv.wrapped_cauchy_sample(WrappedCauchyParams(phi), stream(10), 100_000)
        se = math.sqrt(0.5 / z.size)
        assert abs(z.real.mean() - phi.real) < 4 * se
        assert abs(z.imag.mean() - phi.imag) < 4 * se

    def test_sample_against_cdf(self, stream):
        p = WrappedCauchyParams(0.8)
        z = uv.wrapped_cauchy_sample(p, stream(11), 5000)
        assert uv.ks_test(_angles(z), lambda t: uv.wrapped_cauchy_cdf(t, p)).pvalue > 0.01

    def test_mle_degenerate_sample(self):
        z0 = np.exp(0.7j)
        estimate = uv.wrapped_cauchy_mle(np.full(10, z0))
        assert estimate.at_boundary
        assert abs(estimate.phi) <= 1 - 1e-9 + 1e-15
        assert abs(estimate.phi / abs(estimate.phi) - z0) < 1e-9

    def test_mle_accuracy(self, stream):
        n = 5000
        z = uv.wrapped_cauchy_sample(WrappedCauchyParams(0.7), stream(12), n)
        estimate = uv.wrapped_cauchy_mle(z)
        assert not estimate.at_boundary
        assert abs(estimate.phi - 0.7) <= 4 * math.sqrt((1 - 0.49) ** 2 / (2 * n))
        assert abs(uv.wrapped_cauchy_score(estimate.phi, z)) / n <= 1e-6

    def test_mle_beats_grid_search(self, stream):
        z = uv.wrapped_cauchy_sample(WrappedCauchyParams(-0.2 + 0.5j), stream(13), 200)
        estimate = uv.wrapped_cauchy_mle(z)
        grid = np.linspace(-0.995, 0.995, 200)
        phi = (grid[:, None] + 1j * grid[None, :]).ravel()
        phi = phi[np.abs(phi) < 1]
        loglik = z.size * np.log1p(-np.abs(phi) ** 2) - np.log(np.abs(z[None, :] - phi[:, None]) ** 2).sum(axis=1)
        assert uv.wrapped_cauchy_log_likelihood(estimate.phi, z) >= loglik.max() - 1e-9

    def test_batch_matches_single(self, stream):
        z = uv.wrapped_cauchy_sample(WrappedCauchyParams(0.3j), stream(14), (4, 50))
        phi, converged, at_boundary, _ = uv.wrapped_cauchy_mle_batch(z)
        assert converged.all() and not at_boundary.any()
        for row, value in zip(z, phi):
            assert abs(uv.wrapped_cauchy_mle(row).phi - value) < 1e-8

    def test_circle_line_maps(self):
        x = np.array([-3.0, -0.5, 0.0, 2.0])
        np.testing.assert_allclose(uv.circle_to_line(uv.line_to_circle(x)), x, atol=1e-12)
        phi = 0.3 + 0.4j
        assert uv.line_to_circle_param(uv.circle_to_line_param(phi)) == pytest.approx(phi)
        assert uv.circle_to_line_param(phi).imag > 0


class TestVonMises:

    def test_uniform_case(self):
        p = VonMisesParams(1.0, 0.0)
        assert uv.von_mises_density(2.0, p) == pytest.approx(1 / TWO_PI)
        assert uv.von_mises_cdf(2.0, p) == pytest.approx(2.0 / TWO_PI)
        assert uv.von_mises_quantile(0.25, p) == pytest.approx(TWO_PI / 4)

    def test_cdf_limits(self):
        p = VonMisesParams(math.pi, 1.16)
        assert uv.von_mises_cdf(0.0, p) == pytest.approx(0.0, abs=1e-12)
        assert uv.von_mises_cdf(TWO_PI, p) == pytest.approx(1.0, abs=1e-10)

    def test_cdf_matches_quadrature(self):
        p = VonMisesParams(5.5, 2.0)
        for t in (0.3, 2.0, 5.0):
            integral = quad_1d(lambda s: uv.von_mises_density(s, p), 0.0, t).value
            assert uv.von_mises_cdf(t, p) == pytest.approx(integral, abs=1e-10)

    def test_quantile_round_trip(self):
        p = VonMisesParams(math.pi, 1.16)
        theta = np.linspace(0.01, TWO_PI - 0.01, 100)
        np.testing.assert_allclose(uv.von_mises_quantile(uv.von_mises_cdf(theta, p), p), theta, atol=1e-8)

    def test_quantile_increasing(self):
        q = uv.von_mises_quantile(np.linspace(0.001, 0.999, 200), VonMisesParams(0.5, 4.0))
        assert np.all(np.diff(q) > 0)

    def test_quantile_rejects_out_of_range(self):
        with pytest.raises(DomainError):
            uv.von_mises_quantile(1.5, VonMisesParams(0.0, 1.0))

    def test_moment_fit(self, stream):
        p = VonMisesParams(2.0, 3.0)
        theta = uv.von_mises_quantile(stream(15).uniform(20_000), p)
        fitted = uv.von_mises_moment_fit(theta)
        assert fitted.mu == pytest.approx(2.0, abs=0.05)
        assert fitted.kappa == pytest.approx(3.0, rel=0.1)


class TestRealCauchy:

    def test_values(self):
        p = RealCauchyParams(1j)
        assert uv.real_cauchy_density(0.0, p) == pytest.approx(1 / math.pi)
        assert uv.real_cauchy_cdf(2.5, RealCauchyParams(2.5 + 0.3j)) == pytest.approx(0.5)

    def test_normalized(self):
        p = RealCauchyParams(0.4 + 2.0j)
        # x = m + s tan(t)
        total = quad_1d(
            lambda t: uv.real_cauchy_density(p.location + p.scale * math.tan(t), p) * p.scale / math.cos(t) ** 2,
            -math.pi / 2 + 1e-9,
            math.pi / 2 - 1e-9,
        ).value
        assert total == pytest.approx(1.0, abs=1e-8)

    def test_invalid_scale(self):
        with pytest.raises(DomainError):
            RealCauchyParams(1.0 + 0j)


class TestKolmogorovSmirnov:

    def test_statistic_at_quantiles(self):
        n = 20
        sample = (np.arange(1, n + 1) - 0.5) / n
        assert uv.ks_test(sample, lambda x: x).statistic == pytest.approx(0.5 / n)

    def test_uniform_sample_passes(self, stream):
        assert uv.ks_test(stream(16).uniform(5000), lambda x: np.clip(x, 0, 1)).pvalue > 0.01

    def test_shifted_sample_rejected(self, stream):
        sample = np.clip(stream(17).uniform(5000) + 0.1, 0, 1)
        assert uv.ks_test(sample, lambda x: np.clip(x, 0, 1)).pvalue < 0.001

    def test_empty_sample(self):
        with pytest.raises(DomainError):
            uv.ks_test([], lambda x: x)

    def test_chi_square_merges_small_bins(self):
        observed = np.array([30, 28, 1, 1, 40])
        expected = np.array([30.0, 30.0, 2.0, 2.0, 36.0])
        result = uv.chi_square_test(observed, expected)
        assert 0 < result.pvalue <= 1
