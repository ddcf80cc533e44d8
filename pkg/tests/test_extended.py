"""Shifted start, Mobius marginals, plane and cylinder transforms, marginal transforms."""

import cmath
import math

import numpy as np
import pytest

from brownexit.models import (
    BCParams,
    BSParams,
    MobiusMarginalParams,
    RealCauchyParams,
    ShiftedParams,
    VMCopulaParams,
    VonMisesParams,
    WrappedCauchyParams,
)
from brownexit.stats import extended as ext
from brownexit.stats.bc import bc_log_density, bc_sample
from brownexit.stats.bs import bs_log_density, bs_sample, random_orthogonal, rotation2
from brownexit.stats.circular_fits import vm_copula_sample
from brownexit.stats.mathcore import DomainError, log_sphere_area, quad_torus_2d
from brownexit.stats.univariate import ks_test, real_cauchy_cdf, uniform_sphere_sample, wrapped_cauchy_cdf

TWO_PI = 2 * math.pi


def _circle(theta):
    return np.stack([np.cos(theta), np.sin(theta)], axis=-1)


def _as_complex(x):
    return complex(x[0], x[1])


def _dependence_ok(a, b):
    """Correlation of a and b within 4 standard errors of zero."""
    a = a - a.mean()
    b = b - b.mean()
    products = a * b
    return abs(products.mean()) < 4 * products.std() / math.sqrt(a.size)


class TestShifted:

    def test_origin_start_reduces_to_bs(self, stream):
        q = random_orthogonal(3, stream(1))
        s = bs_sample(BSParams(0.6, q), 50, stream(2))
        shifted = ext.shifted_log_density(s.u, s.v, ShiftedParams(0.6, q, np.zeros(3)))
        np.testing.assert_allclose(shifted, bs_log_density(s.u, s.v, BSParams(0.6, q)), atol=1e-12)

    def test_circle_normalization(self):
        p = ShiftedParams(0.6, rotation2(0.8), [0.3, 0.0])
        total = quad_torus_2d(lambda a, b: np.exp(ext.shifted_log_density(_circle(a), _circle(b), p)))
        assert total == pytest.approx(1.0, abs=1e-8)

    def test_sphere_normalization(self, stream):
        p = ShiftedParams(0.6, random_orthogonal(3, stream(3)), [0.1, 0.2, -0.2])
        n = 200_000
        u = uniform_sphere_sample(3, stream(4), n)
        v = uniform_sphere_sample(3, stream(5), n)
        values = np.exp(ext.shifted_log_density(u, v, p) + 2 * log_sphere_area(3))
        assert abs(values.mean() - 1) < 4 * values.std() / math.sqrt(n)

    def test_start_outside_inner_sphere(self):
        with pytest.raises(DomainError):
            ShiftedParams(0.3, np.eye(2), [0.3, 0.0])

    def test_sample_marginals(self, stream):
        q = rotation2(1.2)
        p = ShiftedParams(0.6, q, [0.3, 0.2])
        s = ext.shifted_sample(p, 5000, stream(6))
        marginal_u, marginal_v = ext.shifted_marginals(p)
        for x, pole in ((s.u, marginal_u.eta), (s.v, marginal_v.eta)):
            angles = np.mod(np.arctan2(x[:, 1], x[:, 0]), TWO_PI)
            cdf = lambda t, pole=pole: wrapped_cauchy_cdf(t, WrappedCauchyParams(_as_complex(pole)))
            assert ks_test(angles, cdf).pvalue > 0.01

    def test_origin_start_matches_bs_moments(self, stream):
        q = rotation2(0.5)
        s = ext.shifted_sample(ShiftedParams(0.5, q, [0.0, 0.0]), 50_000, stream(7))
        x = s.inner(q)
        assert abs(x.mean() - 0.5) < 4 * x.std() / math.sqrt(x.size)

    def test_near_boundary_start(self, stream):
        s = ext.shifted_sample(ShiftedParams(0.5, np.eye(3), [0.45, 0.0, 0.0]), 200, stream(8))
        np.testing.assert_allclose(np.linalg.norm(s.u, axis=1), 1.0, atol=1e-12)
        np.testing.assert_allclose(np.linalg.norm(s.v, axis=1), 1.0, atol=1e-12)


class TestMobiusMarginals:

    def test_reduces_to_bc(self, stream):
        s = bc_sample(BCParams(0.5j), 50, stream(9))
        value = ext.mobius_marginal_log_density(s.z_u, s.z_v, MobiusMarginalParams(0.5j))
        np.testing.assert_allclose(value, bc_log_density(s.z_u, s.z_v, BCParams(0.5j)), atol=1e-12)

    def test_torus_normalization(self):
        p = MobiusMarginalParams(0.5, 0.3j, -0.2)
        total = quad_torus_2d(lambda a, b: np.exp(ext.mobius_marginal_log_density(np.exp(1j * a), np.exp(1j * b), p)))
        assert total == pytest.approx(1.0, abs=1e-8)

    def test_factorizes_only_at_zero_psi(self):
        t = np.linspace(0, TWO_PI, 50, endpoint=False)
        z_u, z_v = np.meshgrid(np.exp(1j * t), np.exp(1j * t), indexing="ij")
        independent = MobiusMarginalParams(0, 0.4 - 0.1j, 0.6j)
        np.testing.assert_allclose(
            ext.mobius_marginal_log_density(z_u, z_v, independent),
            ext.mobius_marginal_product_log_density(z_u, z_v, independent),
            atol=1e-12,
        )
        dependent = MobiusMarginalParams(0.1, 0.4 - 0.1j, 0.6j)
        residual = np.abs(
            ext.mobius_marginal_log_density(z_u, z_v, dependent)
            - ext.mobius_marginal_product_log_density(z_u, z_v, dependent)
        )
        assert residual.max() > 1e-3

    def test_sample_marginals(self, stream):
        p = MobiusMarginalParams(0.6, 0.3j, -0.2)
        s = ext.mobius_marginal_sample(p, 5000, stream(10))
        for z, alpha in ((s.z_u, p.alpha1), (s.z_v, p.alpha2)):
            angles = np.mod(np.angle(z), TWO_PI)
            cdf = lambda t, alpha=alpha: wrapped_cauchy_cdf(t, WrappedCauchyParams(alpha))
            assert ks_test(angles, cdf).pvalue > 0.01

    def test_independent_at_zero_psi(self, stream):
        s = ext.mobius_marginal_sample(MobiusMarginalParams(0, 0.3j, -0.2), 20_000, stream(11))
        for f in (np.real, np.imag):
            for g in (np.real, np.imag):
                assert _dependence_ok(f(s.z_u), g(s.z_v))


class TestPlane:

    def test_theta(self):
        assert ext.plane_theta(0) == pytest.approx(1j)
        assert ext.plane_theta(0.9 * cmath.exp(2j)).imag > 0

    def test_independent_density(self, stream):
        rng = stream(12)
        x = 5 * rng.gaussian(100)
        y = 5 * rng.gaussian(100)
        expected = 1 / (math.pi ** 2 * (1 + x ** 2) * (1 + y ** 2))
        np.testing.assert_allclose(ext.plane_density(x, y, 0), expected, rtol=1e-12)

    def test_marginals_standard_cauchy(self, stream):
        xy = ext.plane_sample(0.6 * cmath.exp(0.7j), 5000, stream(13))
        standard = RealCauchyParams(1j)
        for column in xy.T:
            assert ks_test(column, lambda t: real_cauchy_cdf(t, standard)).pvalue > 0.01

    def test_conditional(self, stream):
        psi = 0.7 * cmath.exp(-0.4j)
        xy = ext.plane_sample(psi, 200_000, stream(14))
        y0 = 0.5
        near = np.abs(xy[:, 1] - y0) < 0.005
        assert near.sum() > 300
        law = ext.plane_conditional(psi, y0)
        assert ks_test(xy[near, 0], lambda t: real_cauchy_cdf(t, law)).pvalue > 0.01


class TestCylinder:

    def test_marginals(self, stream):
        s = ext.cylinder_sample(0.6 + 0.3j, 5000, stream(15))
        assert ks_test(ext.circle_angles(s.z_theta), lambda t: t / TWO_PI).pvalue > 0.01
        assert ks_test(s.x, lambda t: real_cauchy_cdf(t, RealCauchyParams(1j))).pvalue > 0.01

    def test_independent_at_zero_psi(self, stream):
        s = ext.cylinder_sample(0, 20_000, stream(16))
        bounded = np.arctan(s.x)
        assert _dependence_ok(s.z_theta.real, bounded)
        assert _dependence_ok(s.z_theta.imag, bounded)

    def test_density_matches_circle_form(self):
        psi = 0.5 - 0.4j
        theta = np.linspace(0.1, 6.0, 20)
        b = np.linspace(-3.0, 3.0, 20)
        x = np.tan(b / 2)
        value = ext.cylinder_log_density(theta, x, psi) + np.log((1 + x ** 2) / 2)
        np.testing.assert_allclose(value, bc_log_density(np.exp(1j * theta), np.exp(1j * b), BCParams(psi)), atol=1e-12)

    def test_x_given_theta(self, stream):
        psi = 0.6 * cmath.exp(1j)
        s = ext.cylinder_sample(psi, 200_000, stream(17))
        near = np.abs(np.angle(s.z_theta)) < 0.01
        law = ext.cylinder_conditionals(psi, z_theta=1 + 0j)
        assert law.scale > 0
        assert ks_test(s.x[near], lambda t: real_cauchy_cdf(t, law)).pvalue > 0.01

    def test_theta_given_x(self, stream):
        psi = 0.6 * cmath.exp(1j)
        s = ext.cylinder_sample(psi, 200_000, stream(18))
        near = np.abs(s.x) < 0.01
        law = ext.cylinder_conditionals(psi, x=0.0)
        assert law.phi == pytest.approx(psi)
        angles = ext.circle_angles(s.z_theta[near])
        assert ks_test(angles, lambda t: wrapped_cauchy_cdf(t, law)).pvalue > 0.01

    def test_conditionals_need_one_argument(self):
        with pytest.raises(DomainError):
            ext.cylinder_conditionals(0.5)
        with pytest.raises(DomainError):
            ext.cylinder_conditionals(0.5, z_theta=1j, x=0.0)


class TestMarginalTransforms:

    def test_uniform_targets_keep_sample(self, stream):
        s = bc_sample(BCParams(0.5), 100, stream(19))
        theta_u, theta_v = ext.circle_angles(s.z_u), ext.circle_angles(s.z_v)
        a, b = ext.transform_marginals(theta_u, theta_v, ext.CircularUniform(), ext.CircularUniform())
        np.testing.assert_allclose(a, theta_u, atol=1e-12)
        np.testing.assert_allclose(b, theta_v, atol=1e-12)

    def test_von_mises_targets_reproduce_copula_sampler(self, stream):
        p = VMCopulaParams(1.0, 4.0, 2.0, 0.5, 0.4 + 0.4j)
        theta_u, theta_v = vm_copula_sample(p, 200, stream(20))
        s = bc_sample(BCParams(p.psi), 200, stream(20))
        a, b = ext.transform_marginals(
            ext.circle_angles(s.z_u),
            ext.circle_angles(s.z_v),
            ext.VonMisesMarginal(p.marginal_u),
            ext.VonMisesMarginal(p.marginal_v),
        )
        np.testing.assert_array_equal(a, theta_u)
        np.testing.assert_array_equal(b, theta_v)

    def test_round_trip(self, stream):
        s = bc_sample(BCParams(0.5), 200, stream(21))
        theta_u, theta_v = ext.circle_angles(s.z_u), ext.circle_angles(s.z_v)
        target_u = ext.VonMisesMarginal(VonMisesParams(2.0, 1.5))
        target_v = ext.NormalMarginal(1.0, 2.0)
        a, b = ext.transform_marginals(theta_u, theta_v, target_u, target_v)
        back_u, back_v = ext.inverse_transform_marginals(a, b, target_u, target_v)
        np.testing.assert_allclose(back_u, theta_u, atol=1e-8)
        np.testing.assert_allclose(back_v, theta_v, atol=1e-8)

    def test_normal_target(self, stream):
        s = bc_sample(BCParams(0.7j), 5000, stream(22))
        _, x = ext.transform_marginals(
            ext.circle_angles(s.z_u), ext.circle_angles(s.z_v), ext.CircularUniform(), ext.NormalMarginal()
        )
        assert ks_test(x, lambda t: ext.NormalMarginal().cdf(t)).pvalue > 0.01

    def test_cauchy_target(self, stream):
        target = ext.CauchyMarginal(RealCauchyParams(0.5 + 2.0j))
        s = bc_sample(BCParams(-0.6), 4000, stream(23))
        theta_u, theta_v = ext.circle_angles(s.z_u), ext.circle_angles(s.z_v)
        a, b = ext.transform_marginals(theta_u, theta_v, target, ext.CircularUniform())
        assert ks_test(a, lambda t: real_cauchy_cdf(t, target.params)).pvalue > 0.01
        back_u, back_v = ext.inverse_transform_marginals(a, b, target, ext.CircularUniform())
        np.testing.assert_allclose(back_u, theta_u, atol=1e-8)
        np.testing.assert_allclose(back_v, theta_v, atol=1e-12)

    def test_cauchy_quantile_inverts_cdf(self):
        target = ext.CauchyMarginal(RealCauchyParams(-1.0 + 0.3j))
        u = np.linspace(0.001, 0.999, 101)
        np.testing.assert_allclose(target.cdf(target.quantile(u)), u, atol=1e-12)
        assert target.quantile(0.5) == pytest.approx(-1.0)

    def test_non_monotone_target(self):
        class Decreasing(ext.CircularUniform):
            def quantile(self, u):
                return TWO_PI * (1 - np.asarray(u, dtype=float))

        with pytest.raises(DomainError):
            ext.transform_marginals([1.0], [2.0], Decreasing(), ext.CircularUniform())
