"""Von Mises copula, SenGupta and Shieh-Johnson models: densities, fits and AIC/BIC selection."""

import math

import numpy as np
import pytest

from brownexit.models import BCParams, FitResult, SenGuptaParams, ShiehJohnsonParams, VMCopulaParams, VonMisesParams
from brownexit.stats import circular_fits as cf
from brownexit.stats.bc import bc_log_density, bc_sample
from brownexit.stats.extended import circle_angles
from brownexit.stats.mathcore import DomainError, quad_torus_2d
from brownexit.stats.univariate import ks_test, von_mises_cdf, von_mises_density

EXAMPLE = cf.REFERENCE_ESTIMATES["hourly"]
QUICK = cf.FitOptions(starts=2)


def _grid(n=40):
    t = np.linspace(0.05, 2 * math.pi - 0.05, n)
    return np.meshgrid(t, t, indexing="ij")


class TestVonMisesCopula:

    def test_uniform_marginals_give_bc(self):
        tu, tv = _grid()
        value = cf.vm_copula_log_density(tu, tv, VMCopulaParams(0, 0, 0, 0, 0.5))
        expected = bc_log_density(np.exp(1j * tu), np.exp(1j * tv), BCParams(0.5))
        np.testing.assert_allclose(value, expected, atol=1e-12)

    def test_independent_case_factorizes(self):
        tu, tv = _grid()
        p = VMCopulaParams(1.0, 5.0, 0.7, 2.5, 0)
        expected = np.log(von_mises_density(tu, p.marginal_u)) + np.log(von_mises_density(tv, p.marginal_v))
        np.testing.assert_allclose(cf.vm_copula_log_density(tu, tv, p), expected, atol=1e-12)

    @pytest.mark.parametrize("preset", sorted(cf.VM_COPULA_PRESETS))
    def test_presets_normalized(self, preset):
        p = cf.VM_COPULA_PRESETS[preset]
        total = quad_torus_2d(lambda a, b: np.exp(cf.vm_copula_log_density(a, b, p)), rtol=1e-8)
        assert total == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("dataset", sorted(cf.REFERENCE_ESTIMATES))
    def test_reference_estimates_normalized(self, dataset):
        p = cf.REFERENCE_ESTIMATES[dataset]
        total = quad_torus_2d(lambda a, b: np.exp(cf.vm_copula_log_density(a, b, p)), rtol=1e-8)
        assert total == pytest.approx(1.0, abs=1e-6)

    def test_sample_marginals(self, stream):
        theta_u, theta_v = cf.vm_copula_sample(EXAMPLE, 5000, stream(1))
        assert ks_test(theta_u, lambda t: von_mises_cdf(t, EXAMPLE.marginal_u)).pvalue > 0.01
        assert ks_test(theta_v, lambda t: von_mises_cdf(t, EXAMPLE.marginal_v)).pvalue > 0.01

    def test_uniform_marginals_reproduce_bc_sampler(self, stream):
        theta_u, theta_v = cf.vm_copula_sample(VMCopulaParams(0, 0, 0, 0, 0.4j), 100, stream(2))
        s = bc_sample(BCParams(0.4j), 100, stream(2))
        np.testing.assert_allclose(theta_u, circle_angles(s.z_u), atol=1e-12)
        np.testing.assert_allclose(theta_v, circle_angles(s.z_v), atol=1e-12)

    def test_fit_recovers_dependence(self, stream):
        theta_u, theta_v = cf.vm_copula_sample(EXAMPLE, 500, stream(3))
        fit = cf.vm_copula_fit(theta_u, theta_v, options=QUICK)
        assert fit.k == 6 and fit.n == 500
        assert fit.params["psi_abs"] == pytest.approx(0.75, abs=0.1)

    def test_fit_on_uniform_marginals(self, stream):
        theta_u, theta_v = cf.vm_copula_sample(VMCopulaParams(0, 0, 0, 0, 0.5), 1000, stream(4))
        fit = cf.vm_copula_fit(theta_u, theta_v, options=QUICK)
        assert fit.params["kappa1"] <= 0.2
        assert fit.params["kappa2"] <= 0.2

    def test_fit_never_worse_than_start(self, stream):
        theta_u, theta_v = cf.vm_copula_sample(EXAMPLE, 100, stream(5))
        start = cf.vm_copula_initial(theta_u, theta_v)
        fit = cf.vm_copula_fit(theta_u, theta_v, init=start, options=QUICK)
        assert fit.loglik >= float(np.sum(cf.vm_copula_log_density(theta_u, theta_v, start))) - 1e-3
        params = cf.fitted_params(fit)
        assert np.sum(cf.vm_copula_log_density(theta_u, theta_v, params)) == pytest.approx(fit.loglik, abs=1e-6)


class TestSenGupta:

    def test_zero_matrix(self):
        p = SenGuptaParams(np.zeros((3, 3)))
        assert math.exp(cf.sengupta_log_density(1.0, 2.0, p)) == pytest.approx(1 / (4 * math.pi ** 2))

    def test_corner_entry_ignored(self):
        m = np.ones((3, 3))
        assert SenGuptaParams(m).m[0, 0] == 0.0

    def test_normalized(self, stream):
        m = 2 * stream(6).uniform((3, 3)) - 1
        p = SenGuptaParams(m)
        total = quad_torus_2d(lambda a, b: np.exp(cf.sengupta_log_density(a, b, p)))
        assert total == pytest.approx(1.0, abs=1e-9)

    def test_grid_normalizer_matches_quadrature(self, stream):
        p = SenGuptaParams(2 * stream(7).uniform((3, 3)) - 1)
        normalizer = cf.SenGuptaNormalizer(256)
        assert normalizer.log_normalizer(p.m) == pytest.approx(math.log(cf.sengupta_normalizer(p)), abs=1e-9)
        normalizer.log_normalizer(p.m)
        assert normalizer.hits == 1

    def test_fit(self, stream):
        theta_u, theta_v = cf.vm_copula_sample(EXAMPLE, 100, stream(8))
        start = cf.sengupta_initial(theta_u, theta_v)
        fit = cf.sengupta_fit(theta_u, theta_v, init=start, options=cf.FitOptions(starts=1, grid_size=64))
        assert fit.k == 8
        assert set(fit.params) == set(cf.SENGUPTA_KEYS)
        start_loglik = float(np.sum(cf.sengupta_log_density(theta_u, theta_v, start, cf.SenGuptaNormalizer(128))))
        assert fit.loglik >= start_loglik - 1e-6


class TestShiehJohnson:

    def test_no_link_factorizes(self):
        tu, tv = _grid()
        p = ShiehJohnsonParams(1.0, 2.0, 0.5, 1.5, 0.3, 0.0)
        expected = np.log(von_mises_density(tu, VonMisesParams(1.0, 1.5))) + np.log(von_mises_density(tv, VonMisesParams(2.0, 0.3)))
        np.testing.assert_allclose(cf.shieh_johnson_log_density(tu, tv, p), expected, atol=1e-12)

    def test_normalized(self):
        p = ShiehJohnsonParams(0, 0, 0, 1, 1, 1)
        total = quad_torus_2d(lambda a, b: np.exp(cf.shieh_johnson_log_density(a, b, p)), rtol=1e-8)
        assert total == pytest.approx(1.0, abs=1e-6)

    def test_fit(self, stream):
        theta_u, theta_v = cf.vm_copula_sample(EXAMPLE, 100, stream(9))
        start = cf.shieh_johnson_initial(theta_u, theta_v)
        fit = cf.shieh_johnson_fit(theta_u, theta_v, init=start, options=QUICK)
        assert fit.k == 6
        assert fit.loglik >= float(np.sum(cf.shieh_johnson_log_density(theta_u, theta_v, start))) - 1e-3
        assert isinstance(cf.fitted_params(fit), ShiehJohnsonParams)


class TestSelection:

    @pytest.mark.parametrize("dataset", sorted(cf.REFERENCE_FITS))
    def test_reference_criteria(self, dataset):
        for fit in cf.reference_fit_results(dataset):
            _, aic, bic = cf.REFERENCE_FITS[dataset][fit.model]
            assert round(fit.aic, 1) == pytest.approx(aic)
            assert round(fit.bic, 1) == pytest.approx(bic)

    def test_reference_rankings(self):
        hourly = cf.model_select(cf.reference_fit_results("hourly"))
        assert hourly.by_aic[0].model == hourly.by_bic[0].model == "vm-copula"
        half_day = cf.model_select(cf.reference_fit_results("half-day"))
        assert half_day.by_aic[0].model == half_day.by_bic[0].model == "sengupta"

    def test_fewer_parameters_win_ties(self):
        fits = [FitResult("sengupta", {}, -50.0, 8, 40, True, 1), FitResult("vm-copula", {}, -50.0, 6, 40, True, 1)]
        assert cf.model_select(fits).best.model == "vm-copula"

    def test_rows(self):
        rows = cf.model_select(cf.reference_fit_results("half-day")).rows()
        assert [row["rank"] for row in rows] == [1, 2, 3]
        assert rows[0]["bic_rank"] == 1

    def test_mixed_sample_sizes(self):
        fits = [FitResult("vm-copula", {}, -50.0, 6, 30, True, 1), FitResult("sengupta", {}, -50.0, 8, 31, True, 1)]
        with pytest.raises(DomainError):
            cf.model_select(fits)

    def test_unknown_model(self):
        with pytest.raises(DomainError):
            cf.fit_model("kent", np.zeros(20), np.zeros(20))

    def test_too_few_pairs(self):
        with pytest.raises(DomainError):
            cf.vm_copula_fit(np.linspace(0, 1, 5), np.linspace(0, 1, 5))

    @pytest.mark.slow
    def test_copula_data_select_copula(self, stream):
        wins = 0
        for trial in range(50):
            theta_u, theta_v = cf.vm_copula_sample(EXAMPLE, 200, stream(10, trial))
            fits = [cf.fit_model(name, theta_u, theta_v, QUICK) for name in cf.MODEL_NAMES]
            wins += cf.model_select(fits).best.model == "vm-copula"
        assert wins >= 40
