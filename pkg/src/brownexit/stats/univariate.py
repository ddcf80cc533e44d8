"""One-sphere and one-dimensional building blocks.

Uniform and exit laws on S^{d-1}, the H'(theta, nu) family on (-1, 1), wrapped Cauchy laws
on the circle with the Mobius map that generates them, von Mises marginals, Cauchy laws on
the real line and the goodness-of-fit statistics used across the package.

Circle points are complex numbers on the unit circle; vectors on S^{d-1} are numpy arrays
whose last axis holds the coordinates.
"""

import logging
import math
from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy import optimize, stats

from ..models import (
    ExitParams,
    HPrimeParams,
    RealCauchyParams,
    VonMisesParams,
    WrappedCauchyEstimate,
    WrappedCauchyParams,
)
from .mathcore import (
    DomainError,
    EstimationError,
    RngStream,
    bessel_ratio_inverse,
    invert_cdf,
    log_beta,
    log_bessel_i0,
    log_sphere_area,
    nelder_mead,
    quad_1d,
)

logger = logging.getLogger(__name__)

LOG_TWO_PI = math.log(2 * math.pi)
BOUNDARY_CLAMP = 1 - 1e-9
LOW_ACCEPTANCE = 0.01


class TestResult(NamedTuple):
    """Statistic and p-value of a goodness-of-fit test."""
    statistic: float
    pvalue: float


# Uniform and exit laws on the sphere

def uniform_sphere_sample(d: int, rng: RngStream, size: Optional[int] = None) -> np.ndarray:
    """Uniform point(s) on S^{d-1} from normalized Gaussian vectors."""
    if d < 2:
        raise DomainError(f"sphere dimension must be >= 2, got d={d}")
    shape = (d,) if size is None else (size, d)
    g = rng.gaussian(shape)
    return g / np.linalg.norm(g, axis=-1, keepdims=True)


def exit_density(x, p: ExitParams):
    """Density of Exit_d(eta) with respect to surface measure on S^{d-1}."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != p.d:
        raise DomainError(f"point has dimension {x.shape[-1]}, pole has dimension {p.d}")
    dist = np.linalg.norm(x - p.eta, axis=-1)
    out = np.exp(-log_sphere_area(p.d)) * (1 - p.eta @ p.eta) / dist ** p.d
    return float(out) if np.ndim(out) == 0 else out


def exit_sample(p: ExitParams, rng: RngStream, size: Optional[int] = None) -> np.ndarray:
    """Draw(s) from Exit_d(eta): X = W mu + sqrt(1 - W^2) t with W ~ H'(||eta||, (d-2)/2)."""
    rows = 1 if size is None else size
    out = exit_sample_rows(np.broadcast_to(p.eta, (rows, p.d)), rng)
    return out[0] if size is None else out


def exit_sample_rows(eta, rng: RngStream) -> np.ndarray:
    """One Exit_d(eta_j) draw for every row eta_j of an (m, d) array of poles."""
    eta = np.atleast_2d(np.asarray(eta, dtype=float))
    m, d = eta.shape
    if d < 2:
        raise DomainError(f"sphere dimension must be >= 2, got d={d}")
    r = np.linalg.norm(eta, axis=1)
    if np.any(r >= 1):
        raise DomainError(f"exit poles must satisfy ||eta|| < 1, max is {r.max():.6g}")

    mu = np.zeros_like(eta)
    inside = r > 0
    mu[inside] = eta[inside] / r[inside, None]
    # eta = 0 is the uniform law; any axis works
    mu[~inside, 0] = 1.0

    w = _hprime_draw(r, 0.5 * (d - 2), rng)
    g = rng.gaussian((m, d))
    g -= np.einsum("ij,ij->i", g, mu)[:, None] * mu
    t = g / np.linalg.norm(g, axis=1, keepdims=True)
    return w[:, None] * mu + np.sqrt(np.clip(1 - w ** 2, 0, None))[:, None] * t


# H'(theta, nu)

def hprime_log_density(x, p: HPrimeParams):
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1):
        raise DomainError("H' density is defined on [-1, 1]")
    theta, nu = p.theta, p.nu
    with np.errstate(divide="ignore", invalid="ignore"):
        edge = 0.0 if nu == 0.5 else (nu - 0.5) * np.log1p(-x ** 2)
        out = (
            math.log1p(-theta ** 2)
            + edge
            - log_beta(nu + 0.5, 0.5)
            - (nu + 1) * np.log1p(theta ** 2 - 2 * theta * x)
        )
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


def hprime_density(x, p: HPrimeParams):
    """Density of H'(theta, nu): (1-theta^2)(1-x^2)^(nu-1/2) / [B(nu+1/2, 1/2)(1-2 theta x+theta^2)^(nu+1)].

    At |x| = 1 the density is 0 when nu > 1/2 and infinite when nu < 1/2.
    """
    with np.errstate(over="ignore"):
        out = np.exp(hprime_log_density(x, p))
    return float(out) if np.ndim(out) == 0 else out


def hprime_cdf(x, p: HPrimeParams):
    """CDF of H'(theta, nu) by quadrature in the angle s with x = -cos(s)."""
    theta, nu = p.theta, p.nu
    const = math.log1p(-theta ** 2) - log_beta(nu + 0.5, 0.5)

    def integrand(s):
        return math.exp(
            const + 2 * nu * math.log(max(math.sin(s), 1e-300)) - (nu + 1) * math.log1p(theta ** 2 + 2 * theta * math.cos(s))
        )

    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1):
        raise DomainError("H' CDF is defined on [-1, 1]")
    values = np.array([quad_1d(integrand, 0.0, math.acos(-xi)).value for xi in x.reshape(-1)])
    values = np.clip(values, 0.0, 1.0).reshape(x.shape)
    return float(values) if values.ndim == 0 else values


def hprime_mean(p: HPrimeParams) -> float:
    """E[X] under H'(theta, nu); free of nu."""
    return p.theta


def hprime_second_moment(p: HPrimeParams) -> float:
    return (1 + (2 * p.nu + 1) * p.theta ** 2) / (2 * (p.nu + 1))


def hprime_sample(p: HPrimeParams, rng: RngStream, size: Optional[int] = None):
    """Rejection sampler for H'(theta, nu) from the symmetric theta = 0 member.

    Proposals x = 2B - 1 with B ~ Beta(nu + 1/2, nu + 1/2) are accepted with probability
    ((1 - |theta|)^2 / (1 - 2 theta x + theta^2))^(nu + 1). The overall acceptance rate is
    (1 - |theta|)^(2 nu + 1) / (1 + |theta|).
    """
    rows = 1 if size is None else size
    out = _hprime_draw(np.full(rows, p.theta), p.nu, rng)
    return float(out[0]) if size is None else out


def hprime_acceptance_rate(theta: float, nu: float) -> float:
    return (1 - abs(theta)) ** (2 * nu + 1) / (1 + abs(theta))


def _hprime_draw(theta: np.ndarray, nu: float, rng: RngStream) -> np.ndarray:
    if not nu > -0.5:
        raise DomainError(f"H' requires nu > -1/2, got {nu}")
    theta = np.ravel(np.asarray(theta, dtype=float))
    worst = hprime_acceptance_rate(float(np.abs(theta).max(initial=0.0)), nu)
    if worst < LOW_ACCEPTANCE:
        logger.warning(f"H' rejection sampler acceptance rate is {worst:.2%} (theta={np.abs(theta).max():.3f}, nu={nu})")

    out = np.empty_like(theta)
    pending = np.arange(theta.size)
    a = nu + 0.5
    rounds = 0
    while pending.size:
        th = theta[pending]
        x = 2 * rng.generator.beta(a, a, size=pending.size) - 1
        ratio = ((1 - np.abs(th)) ** 2 / (1 - 2 * th * x + th ** 2)) ** (nu + 1)
        accept = rng.uniform(pending.size) < ratio
        out[pending[accept]] = x[accept]
        pending = pending[~accept]
        rounds += 1
    logger.debug(f"H' sampler drew {theta.size} values in {rounds} rounds")
    return out


def hprime_log_likelihood(theta: float, x, nu: float) -> float:
    x = np.asarray(x, dtype=float)
    return float(x.size * math.log1p(-theta ** 2) - (nu + 1) * np.sum(np.log1p(theta ** 2 - 2 * theta * x)))


def hprime_score(theta: float, x, nu: float) -> float:
    """Derivative of the H' log-likelihood in theta."""
    x = np.asarray(x, dtype=float)
    return float(-2 * x.size * theta / (1 - theta ** 2) + 2 * (nu + 1) * np.sum((x - theta) / (1 - 2 * theta * x + theta ** 2)))


def hprime_mle(x, nu: float, lo: float = -BOUNDARY_CLAMP, hi: float = BOUNDARY_CLAMP):
    """Maximum likelihood estimate of theta in H'(theta, nu) over [lo, hi].

    Bounded Brent search followed by a root refinement of the score.

    Returns:
        Tuple (theta_hat, at_boundary, score at theta_hat)
    """
    x = np.asarray(x, dtype=float)
    if x.size < 1:
        raise DomainError("H' MLE needs at least one observation")

    def negative(t):
        return -hprime_log_likelihood(t, x, nu)

    res = optimize.minimize_scalar(negative, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    t = float(res.x)
    delta = 1e-6
    a, b = max(lo, t - delta), min(hi, t + delta)
    sa, sb = hprime_score(a, x, nu), hprime_score(b, x, nu)
    if sa > 0 > sb:
        t = float(optimize.brentq(lambda s: hprime_score(s, x, nu), a, b, xtol=1e-15, maxiter=200))

    best = max((t, lo, hi), key=lambda s: hprime_log_likelihood(s, x, nu))
    at_boundary = best in (lo, hi)
    if at_boundary:
        logger.debug(f"H' MLE attained at the boundary theta={best}")
    return best, at_boundary, hprime_score(best, x, nu)


# Wrapped Cauchy and Mobius maps

def wrapped_cauchy_density(z, p: WrappedCauchyParams):
    """(1 - |phi|^2) / (2 pi |z - phi|^2), density with respect to the angle of z."""
    z = np.asarray(z, dtype=complex)
    out = (1 - abs(p.phi) ** 2) / (2 * math.pi * np.abs(z - p.phi) ** 2)
    return float(out) if out.ndim == 0 else out


def wrapped_cauchy_cdf(theta, p: WrappedCauchyParams):
    """CDF of C*(phi) on [0, 2 pi], measured from angle 0."""
    rho, mu = abs(p.phi), np.angle(p.phi)
    theta = np.asarray(theta, dtype=float)

    def primitive(s):
        return np.arctan2((1 + rho) * np.sin(0.5 * s), (1 - rho) * np.cos(0.5 * s)) / math.pi

    mu = mu % (2 * math.pi)
    out = primitive(theta - mu) - primitive(-mu)
    out = np.clip(out, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def mobius_unit(z, beta):
    """(z + beta) / (1 + conj(beta) z); maps the unit circle onto itself and C*(0) onto C*(beta)."""
    z = np.asarray(z, dtype=complex)
    beta = np.asarray(beta, dtype=complex)
    if np.any(np.abs(beta) >= 1):
        raise DomainError("Mobius parameter must satisfy |beta| < 1")
    out = (z + beta) / (1 + np.conj(beta) * z)
    return complex(out) if out.ndim == 0 else out


def mobius_unit_inverse(w, beta):
    """Inverse of :func:`mobius_unit`: (w - beta) / (1 - conj(beta) w)."""
    return mobius_unit(w, -np.asarray(beta, dtype=complex))


def circular_uniform_sample(rng: RngStream, size: Optional[int] = None):
    return np.exp(2j * math.pi * rng.uniform(size))


def wrapped_cauchy_sample(p: WrappedCauchyParams, rng: RngStream, size: Optional[int] = None):
    return mobius_unit(circular_uniform_sample(rng, size), p.phi)


def wrapped_cauchy_log_likelihood(phi: complex, z) -> float:
    z = np.asarray(z, dtype=complex)
    return float(z.size * math.log1p(-abs(phi) ** 2) - np.sum(np.log(np.abs(z - phi) ** 2)))


def wrapped_cauchy_score(phi: complex, z) -> complex:
    """Gradient of the log-likelihood, as d/dRe(phi) + i d/dIm(phi)."""
    z = np.asarray(z, dtype=complex)
    diff = z - phi
    return complex(2 * (np.sum(diff / np.abs(diff) ** 2) - z.size * phi / (1 - abs(phi) ** 2)))


def clamp_to_disc(phi):
    """Pull points onto the disc of radius 1 - 1e-9; returns (clamped, mask of clamped entries)."""
    phi = np.asarray(phi, dtype=complex)
    r = np.abs(phi)
    outside = r > BOUNDARY_CLAMP
    safe = np.where(r > 0, r, 1.0)
    clamped = np.where(outside, phi / safe * BOUNDARY_CLAMP, phi)
    return clamped, outside


def wrapped_cauchy_mle_batch(z, tol: float = 1e-10, max_iterations: int = 10000):
    """Wrapped Cauchy MLE for every row of an (R, n) array of circle points.

    Each row is rotated towards its mean direction, mapped to the real line by
    x = i(1 - z)/(1 + z) = tan(angle/2), fitted as a Cauchy location-scale sample by EM, and
    mapped back. Maximum likelihood is preserved under these maps because their Jacobians do
    not involve the parameter.

    Returns:
        Tuple (phi_hat, converged, at_boundary, iterations) of arrays with one entry per row
    """
    z = np.atleast_2d(np.asarray(z, dtype=complex))
    rows, n = z.shape
    if n < 1:
        raise DomainError("wrapped Cauchy MLE needs at least one observation")

    mean = z.mean(axis=1)
    omega = np.where(np.abs(mean) > 1e-12, mean / np.where(np.abs(mean) > 0, np.abs(mean), 1), 1.0)
    w = z * np.conj(omega)[:, None]
    denom = 1 + w.real
    x = np.where(denom > 1e-15, w.imag / np.where(denom > 1e-15, denom, 1), 1e15)

    loc = np.median(x, axis=1)
    q75, q25 = np.percentile(x, [75, 25], axis=1)
    scale = np.maximum(0.5 * (q75 - q25), 1e-3)

    phi = _line_to_disc(loc + 1j * scale)
    converged = np.zeros(rows, dtype=bool)
    degenerate = np.zeros(rows, dtype=bool)
    iterations = np.zeros(rows, dtype=int)
    active = np.arange(rows)
    for it in range(1, max_iterations + 1):
        xa, la, sa = x[active], loc[active], scale[active]
        tau = 2 / (1 + ((xa - la[:, None]) / sa[:, None]) ** 2)
        la = np.sum(tau * xa, axis=1) / np.sum(tau, axis=1)
        tau_scale = np.sum(tau * (xa - la[:, None]) ** 2, axis=1) / n
        sa = np.sqrt(tau_scale)
        collapsed = sa < 1e-14 * np.maximum(1, np.abs(la))
        sa = np.where(collapsed, 1e-14 * np.maximum(1, np.abs(la)), sa)
        new_phi = _line_to_disc(la + 1j * sa)
        done = (np.abs(new_phi - phi[active]) <= tol) | collapsed
        loc[active], scale[active], phi[active] = la, sa, new_phi
        iterations[active] = it
        degenerate[active[collapsed]] = True
        converged[active[done]] = True
        active = active[~done]
        if not active.size:
            break

    phi = phi * omega
    phi, at_boundary = clamp_to_disc(phi)
    at_boundary |= degenerate
    return phi, converged, at_boundary, iterations


def _line_to_disc(eta):
    return (1 + 1j * eta) / (1 - 1j * eta)


def wrapped_cauchy_mle(z, tol: float = 1e-10, max_iterations: int = 10000) -> WrappedCauchyEstimate:
    """Maximum likelihood estimate of phi in C*(phi).

    A sample concentrated at one point has its likelihood maximized on the boundary; the
    estimate is then clamped to |phi| = 1 - 1e-9 and flagged.

    Raises:
        EstimationError: if neither the EM iteration nor the simplex fallback reaches a
            stationary point
    """
    z = np.ravel(np.asarray(z, dtype=complex))
    if z.size < 1:
        raise DomainError("wrapped Cauchy MLE needs at least one observation")
    if z.size < 2:
        logger.warning("wrapped Cauchy MLE from a single observation lies on the boundary")

    if np.max(np.abs(z - z[0])) < 1e-12:
        phi, _ = clamp_to_disc(z[0])
        return WrappedCauchyEstimate(complex(phi), at_boundary=True, iterations=0, method="degenerate")

    phi, converged, boundary, iterations = wrapped_cauchy_mle_batch(z[None, :], tol, max_iterations)
    estimate = complex(phi[0])
    if bool(boundary[0]):
        logger.warning(f"wrapped Cauchy MLE on the boundary: |phi|={abs(estimate):.12f}")
        return WrappedCauchyEstimate(estimate, at_boundary=True, iterations=int(iterations[0]), method="em")

    stationary = abs(wrapped_cauchy_score(estimate, z)) / z.size <= 1e-6
    if converged[0] and stationary:
        return WrappedCauchyEstimate(estimate, at_boundary=False, iterations=int(iterations[0]), method="em")

    logger.debug("wrapped Cauchy EM did not settle; polishing with Nelder-Mead")
    return _wrapped_cauchy_polish(z, estimate)


def _wrapped_cauchy_polish(z: np.ndarray, start: complex) -> WrappedCauchyEstimate:
    # disc coordinates through phi = tanh(r) e^{i a}, written in Cartesian form
    def unpack(v):
        r = math.hypot(v[0], v[1])
        return 0j if r == 0 else complex(v[0], v[1]) * math.tanh(r) / r

    r0 = abs(start)
    v0 = np.zeros(2) if r0 == 0 else np.array([start.real, start.imag]) * math.atanh(min(r0, BOUNDARY_CLAMP)) / r0
    result = nelder_mead(lambda v: -wrapped_cauchy_log_likelihood(unpack(v), z), v0, xatol=1e-12, fatol=1e-14)
    estimate = unpack(result.argmin)
    if abs(wrapped_cauchy_score(estimate, z)) / z.size > 1e-6:
        raise EstimationError("wrapped Cauchy MLE did not reach a stationary point", last_iterate=estimate)
    return WrappedCauchyEstimate(estimate, at_boundary=False, iterations=result.iterations, method="nelder-mead")


# Circle and line

def circle_to_line(z):
    """x = i(1 - z)/(1 + z); real for |z| = 1."""
    z = np.asarray(z, dtype=complex)
    out = (1j * (1 - z) / (1 + z)).real
    return float(out) if out.ndim == 0 else out


def line_to_circle(x):
    """z = (1 + ix)/(1 - ix), inverse of :func:`circle_to_line`."""
    x = np.asarray(x, dtype=float)
    out = (1 + 1j * x) / (1 - 1j * x)
    return complex(out) if out.ndim == 0 else out


def circle_to_line_param(phi: complex) -> complex:
    """C*(phi) on the circle corresponds to C(i(1 - phi)/(1 + phi)) on the line."""
    return 1j * (1 - phi) / (1 + phi)


def line_to_circle_param(eta: complex) -> complex:
    return (1 + 1j * eta) / (1 - 1j * eta)


def real_cauchy_density(x, p: RealCauchyParams):
    x = np.asarray(x, dtype=float)
    s, m = p.scale, p.location
    out = s / (math.pi * (s ** 2 + (x - m) ** 2))
    return float(out) if out.ndim == 0 else out


def real_cauchy_cdf(x, p: RealCauchyParams):
    x = np.asarray(x, dtype=float)
    out = 0.5 + np.arctan((x - p.location) / p.scale) / math.pi
    return float(out) if out.ndim == 0 else out


# Von Mises

def von_mises_density(theta, p: VonMisesParams):
    theta = np.asarray(theta, dtype=float)
    out = np.exp(p.kappa * np.cos(theta - p.mu) - log_bessel_i0(p.kappa) - LOG_TWO_PI)
    return float(out) if out.ndim == 0 else out


def von_mises_cdf(theta, p: VonMisesParams):
    """F(theta) = integral of the vM(mu, kappa) density from 0 to theta, for theta in [0, 2 pi]."""
    theta = np.asarray(theta, dtype=float)
    if p.kappa == 0:
        out = theta / (2 * math.pi)
    else:
        dist = stats.vonmises(p.kappa, loc=p.mu)
        out = dist.cdf(theta) - dist.cdf(0.0)
    out = np.clip(out, 0.0, 1.0)
    return float(out) if np.ndim(out) == 0 else out


def von_mises_quantile(u, p: VonMisesParams):
    """Inverse of :func:`von_mises_cdf` on [0, 1]."""
    u = np.asarray(u, dtype=float)
    if np.any((u < 0) | (u > 1)):
        raise DomainError("von Mises quantile requires 0 <= u <= 1")
    if p.kappa == 0:
        out = 2 * math.pi * u
        return float(out) if out.ndim == 0 else out
    return invert_cdf(
        lambda t: von_mises_cdf(t, p),
        lambda t: von_mises_density(t, p),
        u,
        0.0,
        2 * math.pi,
    )


def circular_mean(theta) -> float:
    """Mean direction in [0, 2 pi)."""
    theta = np.asarray(theta, dtype=float)
    return float(np.arctan2(np.sin(theta).sum(), np.cos(theta).sum()) % (2 * math.pi))


def mean_resultant_length(theta) -> float:
    theta = np.asarray(theta, dtype=float)
    return float(np.abs(np.exp(1j * theta).mean()))


def von_mises_moment_fit(theta) -> VonMisesParams:
    """Mean direction and concentration from the inverse Bessel ratio of the resultant length."""
    r = min(mean_resultant_length(theta), 0.999)
    return VonMisesParams(circular_mean(theta), max(bessel_ratio_inverse(r), 0.0))


# Goodness of fit

def ks_test(sample, cdf: Callable) -> TestResult:
    """One-sample Kolmogorov-Smirnov test with the asymptotic p-value."""
    sample = np.ravel(np.asarray(sample, dtype=float))
    if sample.size == 0:
        raise DomainError("KS test needs a non-empty sample")
    if sample.size < 10:
        logger.warning(f"KS test on only {sample.size} values; the asymptotic p-value is unreliable")
    result = stats.kstest(sample, cdf, method="asymp")
    return TestResult(float(result.statistic), float(result.pvalue))


def chi_square_test(observed, expected, ddof: int = 0, min_expected: float = 5.0) -> TestResult:
    """Pearson chi-square test after merging adjacent bins with small expected counts."""
    observed = np.asarray(observed, dtype=float).ravel()
    expected = np.asarray(expected, dtype=float).ravel()
    if observed.shape != expected.shape or observed.size < 2:
        raise DomainError("chi-square test needs matching observed/expected arrays of length >= 2")

    merged_obs, merged_exp = [], []
    acc_o = acc_e = 0.0
    for o, e in zip(observed, expected):
        acc_o += o
        acc_e += e
        if acc_e >= min_expected:
            merged_obs.append(acc_o)
            merged_exp.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0 and merged_exp:
        merged_obs[-1] += acc_o
        merged_exp[-1] += acc_e
    if len(merged_exp) < 2:
        raise DomainError("too few populated bins for a chi-square test")

    obs = np.array(merged_obs)
    exp = np.array(merged_exp)
    exp *= obs.sum() / exp.sum()
    statistic, pvalue = stats.chisquare(obs, exp, ddof=ddof)
    return TestResult(float(statistic), float(pvalue))


def histogram_chi_square(sample, cdf: Callable, edges) -> TestResult:
    """Chi-square test of binned ``sample`` against the probabilities implied by ``cdf``."""
    sample = np.ravel(np.asarray(sample, dtype=float))
    edges = np.asarray(edges, dtype=float)
    observed, _ = np.histogram(sample, bins=edges)
    probs = np.diff(np.asarray(cdf(edges), dtype=float))
    return chi_square_test(observed, sample.size * probs)
