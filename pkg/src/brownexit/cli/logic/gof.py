"""Goodness of fit of an angle dataset against an implemented bivariate circular density."""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ...models import (
    AngleDataset,
    BCParams,
    CirclePairSample,
    FitResult,
    MobiusMarginalParams,
    SenGuptaParams,
    ShiehJohnsonParams,
    Sign,
    VMCopulaParams,
    VonMisesParams,
    WrappedCauchyParams,
)
from ...stats.bc import bc_log_density, bc_reduction
from ...stats.circular_fits import (
    SenGuptaNormalizer,
    fitted_params,
    sengupta_log_density,
    shieh_johnson_log_density,
    vm_copula_log_density,
)
from ...stats.extended import circle_angles, mobius_marginal_log_density
from ...stats.mathcore import DomainError, quad_torus_2d
from ...stats.univariate import (
    TestResult,
    chi_square_test,
    ks_test,
    mobius_unit_inverse,
    von_mises_cdf,
    wrapped_cauchy_cdf,
)

logger = logging.getLogger(__name__)

TWO_PI = 2 * math.pi
MAX_BINS = 8
CELL_REFINEMENT = 16
MARGINAL_GRID = 512

AngleFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass
class AngularModel:
    """What the tests need from a model: joint log density, marginal CDFs and, when one exists,
    a map of the pairs onto a sample that is i.i.d. C*(psi) under the model."""
    name: str
    log_density: AngleFunction
    cdf_u: Callable
    cdf_v: Callable
    reduction: Optional[AngleFunction] = None
    reduction_cdf: Optional[Callable] = None


def _uniform_cdf(theta):
    return np.asarray(theta, dtype=float) / TWO_PI


def _on_circle(f):
    return lambda tu, tv: f(np.exp(1j * np.asarray(tu)), np.exp(1j * np.asarray(tv)))


def _bc_reduction_angles(sign: Sign) -> AngleFunction:
    return lambda tu, tv: circle_angles(bc_reduction(CirclePairSample.from_angles(tu, tv), sign))


def _numerical_marginals(log_density: AngleFunction, grid: int = MARGINAL_GRID):
    """Marginal CDFs of a density known only jointly, by trapezoid sums on a torus grid."""
    t = TWO_PI * np.arange(grid) / grid
    tu, tv = np.meshgrid(t, t, indexing="ij")
    density = np.exp(log_density(tu, tv))
    nodes = np.append(t, TWO_PI)

    def cdf_from(marginal):
        marginal = np.append(marginal, marginal[0])
        cumulative = np.concatenate([[0.0], np.cumsum(0.5 * (marginal[1:] + marginal[:-1]))])
        cumulative /= cumulative[-1]
        return lambda theta: np.interp(np.asarray(theta, dtype=float), nodes, cumulative)

    return cdf_from(density.sum(axis=1)), cdf_from(density.sum(axis=0))


def angular_model(name: str, params) -> AngularModel:
    """Goodness-of-fit view of an angular model with known parameters."""
    if isinstance(params, BCParams):
        return AngularModel(
            name,
            _on_circle(lambda zu, zv: bc_log_density(zu, zv, params)),
            _uniform_cdf,
            _uniform_cdf,
            _bc_reduction_angles(params.sign),
            lambda theta: wrapped_cauchy_cdf(theta, WrappedCauchyParams(params.psi)),
        )
    if isinstance(params, MobiusMarginalParams):
        m_u, m_v = WrappedCauchyParams(params.alpha1), WrappedCauchyParams(params.alpha2)

        def unmapped(tu, tv):
            z_u = mobius_unit_inverse(np.exp(1j * np.asarray(tu)), params.alpha1)
            z_v = mobius_unit_inverse(np.exp(1j * np.asarray(tv)), params.alpha2)
            return circle_angles(z_u * np.conj(z_v))

        return AngularModel(
            name,
            _on_circle(lambda zu, zv: mobius_marginal_log_density(zu, zv, params)),
            lambda theta: wrapped_cauchy_cdf(theta, m_u),
            lambda theta: wrapped_cauchy_cdf(theta, m_v),
            unmapped,
            lambda theta: wrapped_cauchy_cdf(theta, WrappedCauchyParams(params.psi)),
        )
    if isinstance(params, VMCopulaParams):
        def uniformized(tu, tv):
            return _bc_reduction_angles(Sign.PLUS)(
                TWO_PI * von_mises_cdf(tu, params.marginal_u), TWO_PI * von_mises_cdf(tv, params.marginal_v)
            )

        return AngularModel(
            name,
            lambda tu, tv: vm_copula_log_density(tu, tv, params),
            lambda theta: von_mises_cdf(theta, params.marginal_u),
            lambda theta: von_mises_cdf(theta, params.marginal_v),
            uniformized,
            lambda theta: wrapped_cauchy_cdf(theta, WrappedCauchyParams(params.psi)),
        )
    if isinstance(params, ShiehJohnsonParams):
        vm_u, vm_v = VonMisesParams(params.mu1, params.kappa1), VonMisesParams(params.mu2, params.kappa2)
        return AngularModel(
            name,
            lambda tu, tv: shieh_johnson_log_density(tu, tv, params),
            lambda theta: von_mises_cdf(theta, vm_u),
            lambda theta: von_mises_cdf(theta, vm_v),
        )
    if isinstance(params, SenGuptaParams):
        normalizer = SenGuptaNormalizer(256)

        def log_density(tu, tv):
            return sengupta_log_density(tu, tv, params, normalizer)

        cdf_u, cdf_v = _numerical_marginals(log_density)
        return AngularModel(name, log_density, cdf_u, cdf_v)
    raise DomainError(f"no goodness-of-fit view for model {name!r}")


def default_bins(n: int) -> int:
    """Bins per axis so that the average cell expects at least 5 points, between 2 and 8."""
    return int(min(MAX_BINS, max(2, math.floor(math.sqrt(n / 5)))))


def cell_probabilities(log_density: AngleFunction, bins: int, refine: int = CELL_REFINEMENT) -> np.ndarray:
    """(bins, bins) probabilities of the equal-width torus cells, by midpoint sums."""
    m = bins * refine
    t = TWO_PI * (np.arange(m) + 0.5) / m
    tu, tv = np.meshgrid(t, t, indexing="ij")
    mass = np.exp(log_density(tu, tv)).reshape(bins, refine, bins, refine).sum(axis=(1, 3))
    return mass / mass.sum()


def histogram_chi_square_2d(theta_u, theta_v, log_density: AngleFunction, bins: int) -> TestResult:
    edges = np.linspace(0.0, TWO_PI, bins + 1)
    observed, _, _ = np.histogram2d(theta_u, theta_v, bins=[edges, edges])
    expected = theta_u.size * cell_probabilities(log_density, bins)
    return chi_square_test(observed, expected)


@dataclass
class GofReport:
    model: str
    n: int
    marginal_u: TestResult
    marginal_v: TestResult
    histogram: Optional[TestResult]
    bins: int
    reduction: Optional[TestResult]
    normalization: float

    def tests(self) -> dict:
        out = {"marginal theta_u KS": self.marginal_u, "marginal theta_v KS": self.marginal_v}
        if self.histogram is not None:
            out[f"{self.bins}x{self.bins} histogram chi-square"] = self.histogram
        if self.reduction is not None:
            out["reduction to C*(psi) KS"] = self.reduction
        return out

    def passes(self, level: float = 0.01) -> bool:
        return all(t.pvalue > level for t in self.tests().values())

    def to_dict(self) -> dict:
        def entry(t: Optional[TestResult]):
            return None if t is None else {"statistic": t.statistic, "pvalue": t.pvalue}

        return {
            "model": self.model,
            "n": self.n,
            "marginal_u_ks": entry(self.marginal_u),
            "marginal_v_ks": entry(self.marginal_v),
            "histogram_chi_square": entry(self.histogram),
            "bins": self.bins,
            "reduction_ks": entry(self.reduction),
            "normalization": self.normalization,
        }


def run_gof(dataset: AngleDataset, model: AngularModel, bins: Optional[int] = None) -> GofReport:
    """Marginal KS tests, a 2-D histogram chi-square and, where available, the reduction KS test."""
    theta_u, theta_v = dataset.theta_u, dataset.theta_v
    bins = bins or default_bins(dataset.n)

    normalization = quad_torus_2d(lambda tu, tv: np.exp(model.log_density(tu, tv)), n=64, rtol=1e-8, max_n=1024)
    if abs(normalization - 1) > 1e-6:
        logger.warning(f"{model.name} density integrates to {normalization:.8f}")

    try:
        histogram = histogram_chi_square_2d(theta_u, theta_v, model.log_density, bins)
    except DomainError as e:
        logger.warning(f"histogram chi-square skipped: {e}")
        histogram = None

    reduction = None
    if model.reduction is not None:
        reduction = ks_test(model.reduction(theta_u, theta_v), model.reduction_cdf)

    report = GofReport(
        model=model.name,
        n=dataset.n,
        marginal_u=ks_test(theta_u, model.cdf_u),
        marginal_v=ks_test(theta_v, model.cdf_v),
        histogram=histogram,
        bins=bins,
        reduction=reduction,
        normalization=normalization,
    )
    logger.info(f"{model.name} goodness of fit on {dataset.n} pairs: {'pass' if report.passes() else 'reject'}")
    return report


def fit_from_report(report: dict, model: str) -> FitResult:
    """The ``model`` entry of a fit report as a FitResult."""
    for entry in report.get("fits", []):
        if entry.get("model") == model:
            return FitResult(
                model=model,
                params=entry["params"],
                loglik=entry["loglik"],
                k=entry["k"],
                n=entry["n"],
                converged=entry["converged"],
                iterations=entry["iterations"],
            )
    raise DomainError(f"fit report has no {model} fit")


def angular_model_from_fit(fit: FitResult) -> AngularModel:
    return angular_model(fit.model, fitted_params(fit))
