"""The BS_d(rho Q) family of pairs of unit vectors.

(U, V) has density (1 - rho^2) / (A_{d-1}^2 (1 - 2 rho u'Qv + rho^2)^{d/2}) on
S^{d-1} x S^{d-1}: both marginals are uniform and V | U = u ~ Exit_d(rho Q'u).
"""

import logging
import math
from typing import Callable, NamedTuple, Union

import numpy as np
from scipy import linalg
from scipy import stats as sps

from ..models import BSParams, HPrimeParams, MomCovariance, MomEstimate, PairSample, RhoEstimate
from .mathcore import (
    DomainError,
    EstimationError,
    RngStream,
    beta_fn,
    log_sphere_area,
    reg_inc_beta,
    top_eigenvalue_sym,
)
from .univariate import (
    BOUNDARY_CLAMP,
    TestResult,
    exit_sample_rows,
    hprime_cdf,
    hprime_density,
    hprime_mle,
    ks_test,
    uniform_sphere_sample,
)

logger = logging.getLogger(__name__)


class BSMoments(NamedTuple):
    mean_u: np.ndarray
    mean_v: np.ndarray
    cov_uu: np.ndarray
    cross_uv: np.ndarray


class HarmonicCheck(NamedTuple):
    """Monte Carlo mean of f(V) given U = u, its standard error and f(rho Q'u)."""
    mean: float
    standard_error: float
    expected: float


def rotation2(theta: float, det_sign: int = 1) -> np.ndarray:
    """[[cos, -det sin], [sin, det cos]]: a rotation for det_sign=+1, a reflection for -1."""
    if det_sign not in (1, -1):
        raise DomainError(f"det_sign must be +1 or -1, got {det_sign}")
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -det_sign * s], [s, det_sign * c]])


def random_orthogonal(d: int, rng: RngStream) -> np.ndarray:
    """Haar-distributed orthogonal matrix (QR of a Gaussian matrix, signs fixed by R's diagonal)."""
    if d < 2:
        raise DomainError(f"orthogonal matrices need d >= 2, got {d}")
    return sps.ortho_group.rvs(d, random_state=rng.generator)


def _check_dims(u: np.ndarray, v: np.ndarray, d: int):
    if u.shape[-1] != d or v.shape[-1] != d:
        raise DomainError(f"points must have dimension {d}, got {u.shape[-1]} and {v.shape[-1]}")


def bs_inner(u, v, q) -> np.ndarray:
    """u'Qv, row by row."""
    u, v = np.asarray(u, dtype=float), np.asarray(v, dtype=float)
    return np.einsum("...i,...i->...", u, v @ np.asarray(q).T)


def bs_log_density(u, v, p: BSParams):
    """Log density with respect to the product of surface measures."""
    u, v = np.asarray(u, dtype=float), np.asarray(v, dtype=float)
    _check_dims(u, v, p.d)
    x = bs_inner(u, v, p.q)
    out = (
        math.log1p(-p.rho ** 2)
        - 2 * log_sphere_area(p.d)
        - 0.5 * p.d * np.log1p(p.rho ** 2 - 2 * p.rho * x)
    )
    return float(out) if np.ndim(out) == 0 else out


def bs_density(u, v, p: BSParams):
    out = np.exp(bs_log_density(u, v, p))
    return float(out) if np.ndim(out) == 0 else out


def bs_sample(p: BSParams, n: int, rng: RngStream) -> PairSample:
    """n pairs: V uniform on the sphere, then U | V = v ~ Exit_d(rho Q v)."""
    if n < 1:
        raise DomainError(f"sample size must be >= 1, got {n}")
    v = uniform_sphere_sample(p.d, rng, size=n)
    u = exit_sample_rows(p.rho * v @ p.q.T, rng)
    return PairSample(u, v)


def bs_moments(p: BSParams) -> BSMoments:
    """E(U) = E(V) = 0, E(UU') = I/d and E(UV') = rho Q / d."""
    d = p.d
    return BSMoments(np.zeros(d), np.zeros(d), np.eye(d) / d, p.rho * p.q / d)


def jw_correlation_theoretical(p: BSParams) -> float:
    return p.rho


def jw_correlation(s: PairSample) -> float:
    """Plug-in Johnson-Wehrly correlation: square root of the top eigenvalue of S_uu^-1 S_uv S_vv^-1 S_uv'."""
    if s.n < s.d + 1:
        raise EstimationError(f"Johnson-Wehrly correlation needs n >= d + 1 = {s.d + 1} pairs, got {s.n}")
    joint = np.cov(np.hstack([s.u, s.v]), rowvar=False)
    d = s.d
    s_uu, s_vv, s_uv = joint[:d, :d], joint[d:, d:], joint[:d, d:]
    try:
        l_u = linalg.cholesky(s_uu, lower=True)
        core = s_uv @ linalg.solve(s_vv, s_uv.T, assume_a="pos")
    except (linalg.LinAlgError, ValueError) as e:
        raise EstimationError(f"sample covariance is singular: {e}")
    half = linalg.solve_triangular(l_u, core, lower=True)
    sym = linalg.solve_triangular(l_u, half.T, lower=True)
    lam = top_eigenvalue_sym(0.5 * (sym + sym.T))
    return math.sqrt(max(lam, 0.0))


def bs_mom_estimate(s: PairSample, project: bool = False) -> MomEstimate:
    """Method-of-moments estimate from E(UV') = rho Q / d.

    rho Q is estimated by (d/n) sum U_j V_j', rho by d |det((1/n) sum U_j V_j')|^{1/d} and Q by
    their ratio. The ratio need not be orthogonal; its deviation ||Q'Q - I|| is reported and
    ``project`` replaces it by the nearest orthogonal matrix.

    Raises:
        EstimationError: if (1/n) sum U_j V_j' does not have full rank d
    """
    d = s.d
    if s.n < 2:
        logger.warning("method-of-moments estimate from a single pair cannot have full rank")
    cross = s.u.T @ s.v / s.n
    rank = np.linalg.matrix_rank(cross)
    if rank < d:
        raise EstimationError(
            f"(1/n) sum U_j V_j' has rank {rank} < d={d}; the moment estimator needs full rank"
        )
    rhoq = d * cross
    rho = d * abs(np.linalg.det(cross)) ** (1.0 / d)
    q = rhoq / rho
    if project:
        q, _ = linalg.polar(q)
    deviation = float(np.linalg.norm(q.T @ q - np.eye(d)))
    return MomEstimate(rho=float(rho), q=q, rhoq=rhoq, orthogonality_deviation=deviation)


def bs_mom_asymptotic_cov(p: BSParams) -> MomCovariance:
    """Asymptotic covariance of sqrt(n) vec(rho_hat Q_hat), vec stacking columns.

    sigma_mn = rho^2 (d q_kj q_il - 2 q_ij q_kl) / (d + 2) for m = d(j-1)+i, n = d(l-1)+k, plus
    1 - 2 rho^2 / (d + 2) on the diagonal.
    """
    d, rho, q = p.d, p.rho, p.q
    cross_term = np.einsum("kj,il->jilk", q, q)
    pair_term = np.einsum("ij,kl->jilk", q, q)
    sigma = (rho ** 2 * (d * cross_term - 2 * pair_term) / (d + 2)).reshape(d * d, d * d)
    sigma += (1 - 2 * rho ** 2 / (d + 2)) * np.eye(d * d)
    return MomCovariance(sigma)


def bs_mle_rho(s: PairSample, q) -> RhoEstimate:
    """Maximum likelihood estimate of rho with Q known.

    The log-likelihood n log(1 - rho^2) - (d/2) sum log(1 - 2 rho x_j + rho^2), x_j = U_j'QV_j,
    is that of H'(rho, (d-2)/2) evaluated at the x_j; it is maximized over [0, 1 - 1e-9].
    """
    q = np.asarray(q, dtype=float)
    x = s.inner(q)
    rho, at_boundary, gradient = hprime_mle(x, 0.5 * (s.d - 2), lo=0.0, hi=BOUNDARY_CLAMP)
    if at_boundary and rho > 0:
        logger.warning(f"rho MLE reached the upper boundary {rho}")
    return RhoEstimate(rho=rho, at_boundary=at_boundary, gradient=gradient)


def t_density(t, p: BSParams):
    """Density of T = U'QV, the H'(rho, (d-2)/2) law."""
    return hprime_density(t, HPrimeParams(p.rho, 0.5 * (p.d - 2)))


def t_cdf(t, p: BSParams):
    return hprime_cdf(t, HPrimeParams(p.rho, 0.5 * (p.d - 2)))


def pivotal_statistic(u, v, p: BSParams):
    """T = (1 - x^2) / (1 - 2 rho x + rho^2) with x = u'Qv; Beta((d-1)/2, 1/2) at the true (rho, Q)."""
    u, v = np.asarray(u, dtype=float), np.asarray(v, dtype=float)
    _check_dims(u, v, p.d)
    x = np.clip(bs_inner(u, v, p.q), -1.0, 1.0)
    out = (1 - x ** 2) / (1 - 2 * p.rho * x + p.rho ** 2)
    return float(out) if np.ndim(out) == 0 else out


def pivotal_cdf(t, d: int):
    return reg_inc_beta(np.clip(t, 0.0, 1.0), 0.5 * (d - 1), 0.5)


def pivotal_test(s: PairSample, p: BSParams) -> TestResult:
    """KS test of the pivotal values against Beta((d-1)/2, 1/2)."""
    if s.d != p.d:
        raise DomainError(f"sample dimension {s.d} does not match model dimension {p.d}")
    t = pivotal_statistic(s.u, s.v, p)
    return ks_test(t, lambda values: pivotal_cdf(values, p.d))


def pivotal_moment(r: float, d: int) -> float:
    """E(T^r) = B(r + (d-1)/2, 1/2) / B((d-1)/2, 1/2)."""
    a = 0.5 * (d - 1)
    return beta_fn(r + a, 0.5) / beta_fn(a, 0.5)


def pivotal_deciles(t, d: int):
    """Empirical deciles of the pivotal values next to the Beta((d-1)/2, 1/2) deciles."""
    probs = np.linspace(0.1, 0.9, 9)
    empirical = np.quantile(np.asarray(t, dtype=float), probs)
    theoretical = sps.beta.ppf(probs, 0.5 * (d - 1), 0.5)
    return [
        {"p": round(float(pr), 1), "empirical": float(e), "beta": float(b)}
        for pr, e, b in zip(probs, empirical, theoretical)
    ]


def harmonic_polynomial(k: int, part: str = "re") -> Callable[[np.ndarray], np.ndarray]:
    """Re or Im of (x_1 + i x_2)^k, harmonic on R^d for every d >= 2."""
    if k < 1 or part not in ("re", "im"):
        raise DomainError(f"invalid harmonic polynomial ({k}, {part})")

    def f(x):
        z = (np.asarray(x)[..., 0] + 1j * np.asarray(x)[..., 1]) ** k
        return z.real if part == "re" else z.imag

    return f


def coordinate_function(i: int) -> Callable[[np.ndarray], np.ndarray]:
    return lambda x: np.asarray(x)[..., i]


HARMONIC_FUNCTIONS = {
    "x1": coordinate_function(0),
    "x2": coordinate_function(1),
    "re2": harmonic_polynomial(2, "re"),
    "im2": harmonic_polynomial(2, "im"),
    "re3": harmonic_polynomial(3, "re"),
    "im3": harmonic_polynomial(3, "im"),
}


def harmonic_conditional_mean_check(
    p: BSParams,
    f: Union[str, Callable[[np.ndarray], np.ndarray]],
    u,
    n: int,
    rng: RngStream,
) -> HarmonicCheck:
    """Monte Carlo E{f(V) | U = u} from V | U = u ~ Exit_d(rho Q'u), next to f(rho Q'u)."""
    if isinstance(f, str):
        try:
            f = HARMONIC_FUNCTIONS[f]
        except KeyError:
            raise DomainError(f"unknown harmonic function {f!r}; choose from {', '.join(HARMONIC_FUNCTIONS)}")
    u = np.asarray(u, dtype=float)
    pole = p.rho * p.q.T @ u
    values = np.asarray(f(exit_sample_rows(np.broadcast_to(pole, (n, p.d)), rng)), dtype=float)
    se = float(values.std(ddof=1) / math.sqrt(n)) if n > 1 else float("nan")
    return HarmonicCheck(float(values.mean()), se, float(f(pole)))
