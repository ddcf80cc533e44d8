"""The circular family BC+(psi) / BC-(psi) in complex form.

The density on the torus is (1 - |psi|^2) / (4 pi^2 |1 - psi z_v conj(z_u)|^2) for BC+ and
(1 - |psi|^2) / (4 pi^2 |1 - psi z_v z_u|^2) for BC-. Under BC+ the statistic
W = Z_U conj(Z_V) is C*(psi) and independent of Z_U; under BC- the same holds for
W = conj(Z_U Z_V). Estimation of psi therefore reduces to the wrapped Cauchy case.
"""

import cmath
import logging
import math

import numpy as np

from ..models import BCParams, BSParams, CirclePairSample, Sign
from .bs import rotation2
from .mathcore import DomainError, RngStream
from .univariate import circular_uniform_sample, mobius_unit, wrapped_cauchy_log_likelihood, wrapped_cauchy_mle

logger = logging.getLogger(__name__)

LOG_FOUR_PI_SQ = math.log(4 * math.pi ** 2)


def _partner(z_u: np.ndarray, sign: Sign) -> np.ndarray:
    # z_u^{-det Q}
    return np.conj(z_u) if sign is Sign.PLUS else z_u


def bc_log_density(z_u, z_v, p: BCParams):
    """Log density with respect to d(theta_u) d(theta_v)."""
    z_u = np.asarray(z_u, dtype=complex)
    z_v = np.asarray(z_v, dtype=complex)
    out = (
        math.log1p(-abs(p.psi) ** 2)
        - LOG_FOUR_PI_SQ
        - np.log(np.abs(1 - p.psi * z_v * _partner(z_u, p.sign)) ** 2)
    )
    return float(out) if np.ndim(out) == 0 else out


def bc_density(z_u, z_v, p: BCParams):
    out = np.exp(bc_log_density(z_u, z_v, p))
    return float(out) if np.ndim(out) == 0 else out


def bc_conditional_param(z_u, p: BCParams):
    """Parameter of the wrapped Cauchy law of Z_V given Z_U = z_u: conj(psi) z_u^{det Q}."""
    z_u = np.asarray(z_u, dtype=complex)
    base = z_u if p.sign is Sign.PLUS else np.conj(z_u)
    out = np.conj(p.psi) * base
    return complex(out) if out.ndim == 0 else out


def bc_sample(p: BCParams, n: int, rng: RngStream) -> CirclePairSample:
    """n pairs: Z_U circular uniform, then Z_V = Mobius(Z_T; conj(psi) Z_U^{det Q}) with Z_T uniform."""
    if n < 1:
        raise DomainError(f"sample size must be >= 1, got {n}")
    z_u = circular_uniform_sample(rng, n)
    z_t = circular_uniform_sample(rng, n)
    z_v = mobius_unit(z_t, bc_conditional_param(z_u, p))
    return CirclePairSample(z_u, z_v / np.abs(z_v))


def bc_moment(j: int, k: int, p: BCParams) -> complex:
    """E(Z_U^j Z_V^k)."""
    psi = p.psi
    if p.sign is Sign.PLUS:
        if j == -k:
            return psi ** j if j >= 0 else psi.conjugate() ** (-j)
        return 0j
    if j == k:
        return psi.conjugate() ** j if j >= 0 else psi ** (-j)
    return 0j


def bc_reduction(s: CirclePairSample, sign=Sign.PLUS) -> np.ndarray:
    """W_j = Z_U conj(Z_V) for BC+, conj(Z_U Z_V) for BC-; i.i.d. C*(psi) under the model."""
    sign = Sign.parse(sign)
    if sign is Sign.PLUS:
        return s.z_u * np.conj(s.z_v)
    return np.conj(s.z_u * s.z_v)


def bc_mom_estimate(s: CirclePairSample, sign=Sign.PLUS) -> complex:
    """psi_hat = (1/n) sum W_j."""
    return complex(bc_reduction(s, sign).mean())


def bc_mle_estimate(s: CirclePairSample, sign=Sign.PLUS) -> complex:
    """Maximum likelihood psi_hat: the wrapped Cauchy MLE of the W_j.

    A single observation gives psi_hat = W_1 exactly.
    """
    w = bc_reduction(s, sign)
    if w.size == 1:
        return complex(w[0])
    estimate = wrapped_cauchy_mle(w)
    if estimate.at_boundary:
        logger.warning(f"BC MLE on the boundary of the disc (n={w.size})")
    return estimate.phi


def bc_log_likelihood(psi: complex, s: CirclePairSample, sign=Sign.PLUS) -> float:
    """Log-likelihood of psi; equals the wrapped Cauchy log-likelihood of the W_j up to a constant."""
    return wrapped_cauchy_log_likelihood(psi, bc_reduction(s, sign)) - s.n * LOG_FOUR_PI_SQ


def bc_fisher_info(psi: complex) -> np.ndarray:
    """Fisher information for (Re psi, Im psi): 2 / (1 - |psi|^2)^2 times the identity."""
    psi = complex(psi)
    if abs(psi) >= 1:
        raise DomainError(f"Fisher information requires |psi| < 1, got {abs(psi):.6g}")
    return 2 / (1 - abs(psi) ** 2) ** 2 * np.eye(2)


def bc_observed_information(psi: complex, s: CirclePairSample, sign=Sign.PLUS, h: float = 1e-4) -> np.ndarray:
    """Negative average Hessian of the log density at psi by central differences."""
    psi = complex(psi)
    steps = (complex(h, 0), complex(0, h))

    def ll(value):
        return bc_log_likelihood(value, s, sign) / s.n

    hess = np.empty((2, 2))
    for a, ea in enumerate(steps):
        for b, eb in enumerate(steps):
            hess[a, b] = (ll(psi + ea + eb) - ll(psi + ea - eb) - ll(psi - ea + eb) + ll(psi - ea - eb)) / (4 * h * h)
    return -hess


def bc_product(s1: CirclePairSample, s2: CirclePairSample) -> CirclePairSample:
    """Componentwise product; BC(psi1) x BC(psi2) of the same sign is BC(psi1 psi2)."""
    if s1.n != s2.n:
        raise DomainError(f"samples differ in length: {s1.n} vs {s2.n}")
    return CirclePairSample(s1.z_u * s2.z_u, s1.z_v * s2.z_v)


def bc_power(s: CirclePairSample, n: int) -> CirclePairSample:
    """Componentwise n-th power; BC(psi) becomes BC(psi^n)."""
    if n < 1:
        raise DomainError(f"power must be a positive integer, got {n}")
    return CirclePairSample(s.z_u ** n, s.z_v ** n)


def bc_root_params(p: BCParams, root: int) -> BCParams:
    """BC(psi^{1/root}) on the principal branch."""
    if root < 1:
        raise DomainError(f"root order must be a positive integer, got {root}")
    return BCParams(p.psi ** (1.0 / root) if p.psi != 0 else 0j, p.sign)


def bc_root_sample(p: BCParams, root: int, n: int, rng: RngStream) -> CirclePairSample:
    """Sample from BC(psi^{1/root}); the product of ``root`` independent such samples is BC(psi)."""
    return bc_sample(bc_root_params(p, root), n, rng)


def bs_to_bc_params(p: BSParams) -> BCParams:
    """BS_2(rho Q) as BC(psi): psi = rho e^{i theta} for a rotation, rho e^{-i theta} for a reflection."""
    if p.d != 2:
        raise DomainError(f"the complex form exists only for d=2, got d={p.d}")
    theta = math.atan2(p.q[1, 0], p.q[0, 0])
    if np.linalg.det(p.q) > 0:
        return BCParams(cmath.rect(p.rho, theta), Sign.PLUS)
    return BCParams(cmath.rect(p.rho, -theta), Sign.MINUS)


def bc_to_bs_params(p: BCParams) -> BSParams:
    theta = cmath.phase(p.psi)
    if p.sign is Sign.PLUS:
        return BSParams(abs(p.psi), rotation2(theta, 1))
    return BSParams(abs(p.psi), rotation2(-theta, -1))


def bs_mom_to_psi(rhoq, sign=Sign.PLUS) -> complex:
    """psi_hat induced by the matrix moment estimate rho_hat Q_hat (d=2)."""
    m = np.asarray(rhoq, dtype=float)
    if m.shape != (2, 2):
        raise DomainError(f"expected a 2x2 matrix, got shape {m.shape}")
    if Sign.parse(sign) is Sign.PLUS:
        return complex(0.5 * (m[0, 0] + m[1, 1]), 0.5 * (m[1, 0] - m[0, 1]))
    return complex(0.5 * (m[0, 0] - m[1, 1]), -0.5 * (m[0, 1] + m[1, 0]))


def circle_to_vectors(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    return np.stack([z.real, z.imag], axis=-1)


def vectors_to_circle(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x[..., 0] + 1j * x[..., 1]
