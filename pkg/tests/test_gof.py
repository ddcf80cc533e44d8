"""Goodness-of-fit views, the fit pipeline and fit-report parsing."""

import math

import numpy as np
import pytest

from brownexit.cli.core.exceptions import UsageError
from brownexit.cli.logic import gof
from brownexit.cli.logic.fit_pipeline import FitSummary, parse_models, run_fits
from brownexit.models import (
    AngleDataset,
    BCParams,
    FitResult,
    MobiusMarginalParams,
    SenGuptaParams,
    Sign,
    VMCopulaParams,
)
from brownexit.stats.bc import bc_sample
from brownexit.stats.circular_fits import FitOptions, vm_copula_sample
from brownexit.stats.extended import circle_angles, mobius_marginal_sample
from brownexit.stats.mathcore import DomainError

EXAMPLE = VMCopulaParams(1.89, 2.01, 1.03, 1.19, 0.75)


def _bc_dataset(psi, n, rng, sign=Sign.PLUS) -> AngleDataset:
    s = bc_sample(BCParams(psi, sign), n, rng)
    return AngleDataset(circle_angles(s.z_u), circle_angles(s.z_v))


def _vm_fit(n=30) -> FitResult:
    return FitResult(
        model="vm-copula",
        params={"mu1": 1.89, "mu2": 2.01, "kappa1": 1.03, "kappa2": 1.19, "psi_abs": 0.75, "psi_arg": 6.24},
        loglik=-65.9,
        k=6,
        n=n,
        converged=True,
        iterations=120,
    )


class TestBins:

    @pytest.mark.parametrize("n,bins", [(1, 2), (20, 2), (45, 3), (80, 4), (320, 8), (100_000, 8)])
    def test_default_bins(self, n, bins):
        assert gof.default_bins(n) == bins

    def test_cell_probabilities_sum_to_one(self):
        view = gof.angular_model("bc+", BCParams(0.7j))
        probs = gof.cell_probabilities(view.log_density, 6)
        assert probs.shape == (6, 6)
        assert probs.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(probs > 0)

    def test_independent_cells_are_equal(self):
        probs = gof.cell_probabilities(gof.angular_model("bc+", BCParams(0)).log_density, 4)
        np.testing.assert_allclose(probs, 1 / 16, atol=1e-12)


class TestBCGof:

    def test_true_model_passes(self, stream):
        data = _bc_dataset(0.6, 2000, stream(1))
        report = gof.run_gof(data, gof.angular_model("bc+", BCParams(0.6)))
        assert report.passes(0.001)
        assert report.normalization == pytest.approx(1.0, abs=1e-6)
        assert report.bins == 8
        assert set(report.tests()) == {
            "marginal theta_u KS",
            "marginal theta_v KS",
            "8x8 histogram chi-square",
            "reduction to C*(psi) KS",
        }

    def test_wrong_dependence_rejected(self, stream):
        data = _bc_dataset(0.6, 2000, stream(2))
        report = gof.run_gof(data, gof.angular_model("bc+", BCParams(0.1)))
        assert report.histogram.pvalue < 1e-6
        assert report.reduction.pvalue < 1e-6
        assert not report.passes()

    def test_wrong_sign_rejected(self, stream):
        data = _bc_dataset(0.6, 2000, stream(3), Sign.MINUS)
        assert gof.run_gof(data, gof.angular_model("bc-", BCParams(0.6, Sign.MINUS))).passes(0.001)
        assert not gof.run_gof(data, gof.angular_model("bc+", BCParams(0.6))).passes()

    def test_explicit_bins(self, stream):
        data = _bc_dataset(0.3, 500, stream(4))
        report = gof.run_gof(data, gof.angular_model("bc+", BCParams(0.3)), bins=3)
        assert report.bins == 3
        assert "3x3 histogram chi-square" in report.tests()

    def test_report_dict(self, stream):
        data = _bc_dataset(0.3, 200, stream(5))
        body = gof.run_gof(data, gof.angular_model("bc+", BCParams(0.3))).to_dict()
        assert body["model"] == "bc+"
        assert body["n"] == 200
        assert set(body["reduction_ks"]) == {"statistic", "pvalue"}


class TestOtherViews:

    def test_vm_copula(self, stream):
        theta_u, theta_v = vm_copula_sample(EXAMPLE, 2000, stream(6))
        report = gof.run_gof(AngleDataset(theta_u, theta_v), gof.angular_model("vm-copula", EXAMPLE))
        assert report.passes(0.001)
        assert report.normalization == pytest.approx(1.0, abs=1e-6)

    def test_vm_copula_rejects_uniform_data(self, stream):
        data = _bc_dataset(0.75, 2000, stream(7))
        report = gof.run_gof(data, gof.angular_model("vm-copula", EXAMPLE))
        assert report.marginal_u.pvalue < 1e-6

    def test_mobius_marginal_reduction(self, stream):
        p = MobiusMarginalParams(0.5, 0.3j, -0.2)
        s = mobius_marginal_sample(p, 2000, stream(8))
        view = gof.angular_model("mobius-marginal", p)
        report = gof.run_gof(AngleDataset(circle_angles(s.z_u), circle_angles(s.z_v)), view)
        assert report.reduction is not None
        assert report.passes(0.001)

    def test_sengupta_numerical_marginals(self):
        flat = gof.angular_model("sengupta", SenGuptaParams(np.zeros((3, 3))))
        t = np.linspace(0, 2 * math.pi, 9)
        np.testing.assert_allclose(flat.cdf_u(t), t / (2 * math.pi), atol=1e-9)
        np.testing.assert_allclose(flat.cdf_v(t), t / (2 * math.pi), atol=1e-9)

        view = gof.angular_model("sengupta", SenGuptaParams.from_free([1.0, 0.5, 0.2, 0.8, 0, 0, 0.3, -0.4]))
        values = view.cdf_u(t)
        assert values[0] == pytest.approx(0.0)
        assert values[-1] == pytest.approx(1.0)
        assert np.all(np.diff(values) > 0)
        assert view.reduction is None

    def test_unknown_params_type(self):
        with pytest.raises(DomainError, match="no goodness-of-fit view"):
            gof.angular_model("bs", object())


class TestFitReports:

    def test_entry_from_report(self):
        body = {"n": 30, "fits": [_vm_fit().to_dict()]}
        fit = gof.fit_from_report(body, "vm-copula")
        assert fit.loglik == -65.9
        assert fit.k == 6
        view = gof.angular_model_from_fit(fit)
        assert view.name == "vm-copula"
        assert view.reduction is not None

    def test_missing_model(self):
        with pytest.raises(DomainError, match="no sengupta fit"):
            gof.fit_from_report({"fits": [_vm_fit().to_dict()]}, "sengupta")

    def test_summary_without_fits(self):
        body = FitSummary(n=30, failures={"sengupta": "NumericalError: boom"}).to_dict()
        assert body["ranking"] == []
        assert body["best_aic"] is None and body["best_bic"] is None


class TestFitPipeline:

    def test_parse_models(self):
        assert parse_models("sengupta, vm-copula,sengupta") == ["sengupta", "vm-copula"]

    @pytest.mark.parametrize("text", ["", " , ", "vm-copula,bogus"])
    def test_parse_models_rejects(self, text):
        with pytest.raises(UsageError):
            parse_models(text)

    def test_too_few_pairs(self):
        data = AngleDataset(np.zeros(5), np.zeros(5))
        with pytest.raises(UsageError, match="at least 10"):
            run_fits(data, ["vm-copula"], FitOptions(starts=1))

    def test_ranking(self, stream):
        theta_u, theta_v = vm_copula_sample(EXAMPLE, 300, stream(9))
        summary = run_fits(AngleDataset(theta_u, theta_v), ["vm-copula", "shieh-johnson"], FitOptions(starts=2))
        body = summary.to_dict()
        assert body["n"] == 300
        fitted = [f["model"] for f in body["fits"]]
        assert "vm-copula" in fitted
        assert set(fitted) | set(body["failures"]) == {"vm-copula", "shieh-johnson"}
        assert [row["rank"] for row in body["ranking"]] == list(range(1, len(fitted) + 1))
        assert body["best_aic"] == summary.ranking.best.model
