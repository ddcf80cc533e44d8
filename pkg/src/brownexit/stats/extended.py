"""Generalizations of the BS/BC families.

Shifted-start model, Mobius-transformed marginals, the plane and cylinder transforms of
BC+/BC- samples, and the marginal-transform (copula) machinery.
"""

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Protocol

import numpy as np
from scipy import stats as sps

from ..models import (
    BCParams,
    CirclePairSample,
    ExitParams,
    MobiusMarginalParams,
    PairSample,
    RealCauchyParams,
    ShiftedParams,
    Sign,
    VonMisesParams,
    WrappedCauchyParams,
    wrap_angle,
)
from .bc import bc_log_density, bc_sample
from .bs import bs_inner
from .mathcore import DomainError, RngStream, log_sphere_area
from .univariate import (
    circle_to_line,
    circle_to_line_param,
    exit_sample,
    exit_sample_rows,
    line_to_circle,
    mobius_unit,
    mobius_unit_inverse,
    real_cauchy_cdf,
    von_mises_cdf,
    von_mises_density,
    von_mises_quantile,
    wrapped_cauchy_density,
)

logger = logging.getLogger(__name__)

TWO_PI = 2 * math.pi


# Shifted start

def shifted_log_density(u, v, p: ShiftedParams):
    """Log density of the pair when the Brownian motion starts at xi instead of the origin.

    The first factor is the exit law of the radius-rho sphere from xi, carried by Q; it
    includes rho^(d-2) so that it integrates to one in every dimension.
    """
    u, v = np.asarray(u, dtype=float), np.asarray(v, dtype=float)
    d, rho, xi = p.d, p.rho, p.xi
    if u.shape[-1] != d or v.shape[-1] != d:
        raise DomainError(f"points must have dimension {d}")
    xi2 = float(xi @ xi)
    u_q_xi = u @ (p.q @ xi)
    out = (
        -2 * log_sphere_area(d)
        + (d - 2) * math.log(rho)
        + math.log(rho ** 2 - xi2)
        - 0.5 * d * np.log(rho ** 2 - 2 * rho * u_q_xi + xi2)
        + math.log1p(-rho ** 2)
        - 0.5 * d * np.log1p(rho ** 2 - 2 * rho * bs_inner(u, v, p.q))
    )
    return float(out) if np.ndim(out) == 0 else out


def shifted_marginals(p: ShiftedParams):
    """Marginal laws (U ~ Exit_d(Q xi / rho), V ~ Exit_d(xi))."""
    return ExitParams(p.q @ p.xi / p.rho), ExitParams(p.xi)


def shifted_sample(p: ShiftedParams, n: int, rng: RngStream) -> PairSample:
    """n pairs: U ~ Exit_d(Q xi / rho), then V | U = u ~ Exit_d(rho Q'u)."""
    if n < 1:
        raise DomainError(f"sample size must be >= 1, got {n}")
    marginal_u, _ = shifted_marginals(p)
    u = exit_sample(marginal_u, rng, size=n)
    v = exit_sample_rows(p.rho * u @ p.q, rng)
    return PairSample(u, v)


# Mobius-transformed marginals

def _mobius_jacobian_log(z, alpha: complex):
    return np.log1p(-abs(alpha) ** 2) - np.log(np.abs(1 - np.conj(alpha) * z) ** 2)


def mobius_marginal_log_density(z_u, z_v, p: MobiusMarginalParams):
    """BC+(psi) density at the pre-images of both Mobius maps times their circle Jacobians."""
    z_u = np.asarray(z_u, dtype=complex)
    z_v = np.asarray(z_v, dtype=complex)
    base = bc_log_density(mobius_unit_inverse(z_u, p.alpha1), mobius_unit_inverse(z_v, p.alpha2), BCParams(p.psi))
    out = base + _mobius_jacobian_log(z_u, p.alpha1) + _mobius_jacobian_log(z_v, p.alpha2)
    return float(out) if np.ndim(out) == 0 else out


def mobius_marginal_marginals(p: MobiusMarginalParams):
    """The wrapped Cauchy marginals C*(alpha1), C*(alpha2)."""
    return WrappedCauchyParams(p.alpha1), WrappedCauchyParams(p.alpha2)


def mobius_marginal_product_log_density(z_u, z_v, p: MobiusMarginalParams):
    """Sum of the two marginal log densities; equals the joint log density exactly when psi = 0."""
    m_u, m_v = mobius_marginal_marginals(p)
    return np.log(wrapped_cauchy_density(z_u, m_u)) + np.log(wrapped_cauchy_density(z_v, m_v))


def mobius_marginal_sample(p: MobiusMarginalParams, n: int, rng: RngStream):
    s = bc_sample(BCParams(p.psi), n, rng)
    z_u = mobius_unit(s.z_u, p.alpha1)
    z_v = mobius_unit(s.z_v, p.alpha2)
    return CirclePairSample(z_u / np.abs(z_u), z_v / np.abs(z_v))


# Plane and cylinder

def plane_theta(psi: complex) -> complex:
    """theta = i(1 - psi)/(1 + psi); Im(theta) > 0 whenever |psi| < 1."""
    return circle_to_line_param(BCParams(psi).psi)


def plane_density(x, y, psi: complex):
    """Im(theta) / (pi^2 |x + y + theta(1 - xy)|^2), the image of BC-(psi) under x = tan(angle/2)."""
    theta = plane_theta(psi)
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    out = theta.imag / (math.pi ** 2 * np.abs(x + y + theta * (1 - x * y)) ** 2)
    return float(out) if np.ndim(out) == 0 else out


def plane_sample(psi: complex, n: int, rng: RngStream) -> np.ndarray:
    """(n, 2) array of (x, y) from BC-(psi) mapped to the line coordinate by coordinate."""
    s = bc_sample(BCParams(psi, Sign.MINUS), n, rng)
    return np.column_stack([circle_to_line(s.z_u), circle_to_line(s.z_v)])


def plane_conditional(psi: complex, y: float) -> RealCauchyParams:
    """Law of X given Y = y: Cauchy with location -Re(phi) and scale Im(phi), phi = (theta + y)/(1 - theta y)."""
    theta = plane_theta(psi)
    phi = (theta + y) / (1 - theta * y)
    return RealCauchyParams(complex(-phi.real, phi.imag))


class CylinderSample(NamedTuple):
    z_theta: np.ndarray
    x: np.ndarray


def cylinder_sample(psi: complex, n: int, rng: RngStream) -> CylinderSample:
    """(Z_theta, X) = (Z_U, i(1 - Z_V)/(1 + Z_V)) from BC+(psi)."""
    s = bc_sample(BCParams(psi), n, rng)
    return CylinderSample(s.z_u, circle_to_line(s.z_v))


def cylinder_log_density(theta, x, psi: complex):
    """Log density with respect to d(theta) dx."""
    x = np.asarray(x, dtype=float)
    z = np.exp(1j * np.asarray(theta, dtype=float))
    out = bc_log_density(z, line_to_circle(x), BCParams(psi)) + math.log(2) - np.log1p(x ** 2)
    return float(out) if np.ndim(out) == 0 else out


def cylinder_x_given_theta(psi: complex, z_theta: complex) -> RealCauchyParams:
    """X | Z_theta = z ~ C(i(1 - conj(psi) z)/(1 + conj(psi) z))."""
    beta = np.conj(BCParams(psi).psi) * complex(z_theta)
    return RealCauchyParams(circle_to_line_param(beta))


def cylinder_theta_given_x(psi: complex, x: float) -> WrappedCauchyParams:
    """Z_theta | X = x ~ C*(((1 + ix)/(1 - ix)) psi)."""
    return WrappedCauchyParams(line_to_circle(float(x)) * BCParams(psi).psi)


def cylinder_conditionals(psi: complex, z_theta: Optional[complex] = None, x: Optional[float] = None):
    """Conditional law given exactly one of ``z_theta`` or ``x``."""
    if (z_theta is None) == (x is None):
        raise DomainError("give exactly one of z_theta or x")
    if z_theta is not None:
        return cylinder_x_given_theta(psi, z_theta)
    return cylinder_theta_given_x(psi, x)


# Marginal transforms

class Marginal(Protocol):
    """A continuous target law with a strictly increasing CDF on its support."""
    support: tuple

    def cdf(self, x): ...

    def quantile(self, u): ...


@dataclass
class CircularUniform:
    support: tuple = (0.0, TWO_PI)

    def cdf(self, x):
        return np.asarray(x, dtype=float) / TWO_PI

    def quantile(self, u):
        return TWO_PI * np.asarray(u, dtype=float)


@dataclass
class VonMisesMarginal:
    params: VonMisesParams
    support: tuple = (0.0, TWO_PI)

    def cdf(self, x):
        return von_mises_cdf(x, self.params)

    def density(self, x):
        return von_mises_density(x, self.params)

    def quantile(self, u):
        return von_mises_quantile(u, self.params)


@dataclass
class NormalMarginal:
    loc: float = 0.0
    scale: float = 1.0
    support: tuple = (-math.inf, math.inf)

    def cdf(self, x):
        return sps.norm.cdf(x, self.loc, self.scale)

    def quantile(self, u):
        return sps.norm.ppf(u, self.loc, self.scale)


@dataclass
class CauchyMarginal:
    params: RealCauchyParams
    support: tuple = (-math.inf, math.inf)

    def cdf(self, x):
        return real_cauchy_cdf(x, self.params)

    def quantile(self, u):
        return self.params.location + self.params.scale * np.tan(math.pi * (np.asarray(u, dtype=float) - 0.5))


def _check_monotone(target: Marginal, name: str):
    u = np.linspace(0.01, 0.99, 99)
    q = np.asarray(target.quantile(u), dtype=float)
    if np.any(np.diff(q) <= 0) or not np.all(np.isfinite(q)):
        raise DomainError(f"target {name} is not strictly increasing")
    back = np.asarray(target.cdf(q), dtype=float)
    if np.any(np.diff(back) <= 0):
        raise DomainError(f"target {name} CDF is not strictly increasing")


def transform_marginals(theta_u, theta_v, target_u: Marginal, target_v: Marginal):
    """Carry uniform-marginal angles onto the targets: (F_U^{-1}(theta_u / 2 pi), F_V^{-1}(theta_v / 2 pi))."""
    _check_monotone(target_u, "U")
    _check_monotone(target_v, "V")
    theta_u = np.asarray(theta_u, dtype=float)
    theta_v = np.asarray(theta_v, dtype=float)
    return target_u.quantile(theta_u / TWO_PI), target_v.quantile(theta_v / TWO_PI)


def inverse_transform_marginals(a, b, target_u: Marginal, target_v: Marginal):
    """Back to uniform-marginal angles: (2 pi F_U(a), 2 pi F_V(b))."""
    return TWO_PI * np.asarray(target_u.cdf(a), dtype=float), TWO_PI * np.asarray(target_v.cdf(b), dtype=float)


def circle_angles(z) -> np.ndarray:
    """Angles of circle points in [0, 2 pi)."""
    return np.atleast_1d(wrap_angle(np.angle(np.asarray(z, dtype=complex))))
