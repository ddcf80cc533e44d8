"""Data models for distribution parameters, samples and fit results."""

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional

import numpy as np

from .stats.mathcore import DomainError

TWO_PI = 2 * math.pi
UNIT_TOL = 1e-12


class Sign(Enum):
    """Determinant of Q; selects BC+ or BC-."""
    PLUS = 1
    MINUS = -1

    @classmethod
    def parse(cls, value) -> "Sign":
        if isinstance(value, Sign):
            return value
        text = str(value).strip()
        if text in ("+", "+1", "1", "plus"):
            return cls.PLUS
        if text in ("-", "-1", "minus"):
            return cls.MINUS
        raise DomainError(f"sign must be + or -, got {value!r}")


class AngleUnit(Enum):
    """Unit of angles in an ingested dataset."""
    RADIANS = "radians"
    DEGREES = "degrees"


def as_unit_vectors(x, tol: float = UNIT_TOL) -> np.ndarray:
    """Validate an array of unit vectors (last axis = coordinates, d >= 2)."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 or x.shape[-1] < 2:
        raise DomainError(f"unit vectors need at least 2 coordinates, got shape {x.shape}")
    norms = np.linalg.norm(x, axis=-1)
    if np.any(np.abs(norms - 1) > tol):
        raise DomainError(f"vectors must have unit norm (max deviation {np.abs(norms - 1).max():.3g})")
    return x


def as_orthogonal(q, tol: float = 1e-10) -> np.ndarray:
    """Validate an orthogonal d x d matrix: Q'Q = I and |det Q| = 1."""
    q = np.asarray(q, dtype=float)
    if q.ndim != 2 or q.shape[0] != q.shape[1] or q.shape[0] < 2:
        raise DomainError(f"Q must be a square matrix of size >= 2, got shape {q.shape}")
    if np.abs(q.T @ q - np.eye(q.shape[0])).max() > tol:
        raise DomainError("Q must be orthogonal (Q'Q = I)")
    if abs(abs(np.linalg.det(q)) - 1) > tol:
        raise DomainError("Q must have |det Q| = 1")
    return q


def wrap_angle(theta):
    """Map angles into [0, 2 pi)."""
    out = np.mod(theta, TWO_PI)
    out = np.where(out >= TWO_PI, 0.0, out)
    return float(out) if np.ndim(out) == 0 else out


@dataclass
class ExitParams:
    """Pole of the exit distribution Exit_d(eta) on S^{d-1}."""
    eta: np.ndarray

    def __post_init__(self):
        self.eta = np.atleast_1d(np.asarray(self.eta, dtype=float))
        if self.eta.ndim != 1 or self.eta.size < 2:
            raise DomainError(f"eta must be a vector of length >= 2, got shape {self.eta.shape}")
        if np.linalg.norm(self.eta) >= 1:
            raise DomainError(f"exit pole must satisfy ||eta|| < 1, got {np.linalg.norm(self.eta):.6g}")

    @property
    def d(self) -> int:
        return self.eta.size


@dataclass
class HPrimeParams:
    """Parameters of H'(theta, nu) on (-1, 1)."""
    theta: float
    nu: float

    def __post_init__(self):
        if not -1 < self.theta < 1:
            raise DomainError(f"H' requires -1 < theta < 1, got {self.theta}")
        if not self.nu > -0.5:
            raise DomainError(f"H' requires nu > -1/2, got {self.nu}")


@dataclass
class WrappedCauchyParams:
    """Wrapped Cauchy C*(phi), |phi| < 1."""
    phi: complex

    def __post_init__(self):
        self.phi = complex(self.phi)
        if abs(self.phi) >= 1:
            raise DomainError(f"wrapped Cauchy requires |phi| < 1, got {abs(self.phi):.6g}")


@dataclass
class VonMisesParams:
    """Von Mises vM(mu, kappa) with mu stored in [0, 2 pi)."""
    mu: float
    kappa: float

    def __post_init__(self):
        if self.kappa < 0:
            raise DomainError(f"von Mises requires kappa >= 0, got {self.kappa}")
        self.mu = wrap_angle(float(self.mu))


@dataclass
class RealCauchyParams:
    """Cauchy C(phi) on the real line: location Re(phi), scale Im(phi)."""
    phi: complex

    def __post_init__(self):
        self.phi = complex(self.phi)
        if self.phi.imag <= 0:
            raise DomainError(f"real Cauchy requires Im(phi) > 0, got {self.phi.imag}")

    @property
    def location(self) -> float:
        return self.phi.real

    @property
    def scale(self) -> float:
        return self.phi.imag


@dataclass
class BSParams:
    """Parameters (rho, Q) of BS_d(rho Q)."""
    rho: float
    q: np.ndarray

    def __post_init__(self):
        self.q = as_orthogonal(self.q)
        if not 0 <= self.rho < 1:
            raise DomainError(f"BS model requires 0 <= rho < 1, got {self.rho}")
        self.rho = float(self.rho)

    @property
    def d(self) -> int:
        return self.q.shape[0]


@dataclass
class PairSample:
    """Paired unit vectors (U_j, V_j), stored as two (n, d) arrays."""
    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        self.u = np.atleast_2d(as_unit_vectors(self.u))
        self.v = np.atleast_2d(as_unit_vectors(self.v))
        if self.u.shape != self.v.shape:
            raise DomainError(f"U and V samples differ in shape: {self.u.shape} vs {self.v.shape}")
        if self.u.shape[0] < 1:
            raise DomainError("a pair sample needs at least one pair")

    @property
    def n(self) -> int:
        return self.u.shape[0]

    @property
    def d(self) -> int:
        return self.u.shape[1]

    def inner(self, q: np.ndarray) -> np.ndarray:
        """x_j = U_j' Q V_j."""
        return np.einsum("ij,ij->i", self.u, self.v @ np.asarray(q).T)


@dataclass
class MomCovariance:
    """Asymptotic covariance of sqrt(n) vec(rho_hat Q_hat), vec stacking columns."""
    sigma: np.ndarray

    @property
    def d(self) -> int:
        return int(round(math.sqrt(self.sigma.shape[0])))

    def entry(self, i: int, j: int, k: int, l: int) -> float:
        """sigma_{mn} with m = d(j-1)+i and n = d(l-1)+k (1-based indices)."""
        d = self.d
        return float(self.sigma[d * (j - 1) + i - 1, d * (l - 1) + k - 1])


@dataclass
class MomEstimate:
    """Method-of-moments estimate of (rho, Q) from E(UV') = rho Q / d."""
    rho: float
    q: np.ndarray
    rhoq: np.ndarray
    orthogonality_deviation: float


@dataclass
class RhoEstimate:
    """Maximum likelihood estimate of rho with Q known."""
    rho: float
    at_boundary: bool
    gradient: float


@dataclass
class WrappedCauchyEstimate:
    """Maximum likelihood estimate of a wrapped Cauchy parameter."""
    phi: complex
    at_boundary: bool
    iterations: int
    method: str

    @property
    def params(self) -> WrappedCauchyParams:
        return WrappedCauchyParams(self.phi)


@dataclass
class BCParams:
    """BC+(psi) or BC-(psi); sign is det Q."""
    psi: complex
    sign: Sign = Sign.PLUS

    def __post_init__(self):
        self.psi = complex(self.psi)
        self.sign = Sign.parse(self.sign)
        if abs(self.psi) >= 1:
            raise DomainError(f"BC model requires |psi| < 1, got {abs(self.psi):.6g}")

    @classmethod
    def from_polar(cls, modulus: float, argument: float, sign=Sign.PLUS) -> "BCParams":
        return cls(cmath.rect(modulus, argument), sign)


@dataclass
class CirclePairSample:
    """Paired circle points (Z_U, Z_V) as complex arrays."""
    z_u: np.ndarray
    z_v: np.ndarray

    def __post_init__(self):
        self.z_u = np.atleast_1d(np.asarray(self.z_u, dtype=complex))
        self.z_v = np.atleast_1d(np.asarray(self.z_v, dtype=complex))
        if self.z_u.shape != self.z_v.shape or self.z_u.ndim != 1:
            raise DomainError("Z_U and Z_V must be 1-D arrays of equal length")
        for name, z in (("Z_U", self.z_u), ("Z_V", self.z_v)):
            if np.any(np.abs(np.abs(z) - 1) > UNIT_TOL):
                raise DomainError(f"{name} entries must lie on the unit circle")

    @classmethod
    def from_angles(cls, theta_u, theta_v) -> "CirclePairSample":
        return cls(np.exp(1j * np.asarray(theta_u, dtype=float)), np.exp(1j * np.asarray(theta_v, dtype=float)))

    @property
    def n(self) -> int:
        return self.z_u.size

    @property
    def theta_u(self) -> np.ndarray:
        return wrap_angle(np.angle(self.z_u))

    @property
    def theta_v(self) -> np.ndarray:
        return wrap_angle(np.angle(self.z_v))


@dataclass
class ShiftedParams:
    """Shifted-start model: Brownian motion from xi, ||xi|| < rho < 1."""
    rho: float
    q: np.ndarray
    xi: np.ndarray

    def __post_init__(self):
        self.q = as_orthogonal(self.q)
        self.xi = np.atleast_1d(np.asarray(self.xi, dtype=float))
        if self.xi.shape != (self.q.shape[0],):
            raise DomainError(f"xi must have length {self.q.shape[0]}, got shape {self.xi.shape}")
        if not np.linalg.norm(self.xi) < self.rho < 1:
            raise DomainError(
                f"shifted model requires ||xi|| < rho < 1, got ||xi||={np.linalg.norm(self.xi):.6g}, rho={self.rho}"
            )
        self.rho = float(self.rho)

    @property
    def d(self) -> int:
        return self.q.shape[0]

    def as_bs(self) -> BSParams:
        return BSParams(self.rho, self.q)


@dataclass
class MobiusMarginalParams:
    """BC+(psi) with each coordinate pushed through a Mobius map with parameter alpha_j."""
    psi: complex
    alpha1: complex = 0j
    alpha2: complex = 0j

    def __post_init__(self):
        self.psi, self.alpha1, self.alpha2 = complex(self.psi), complex(self.alpha1), complex(self.alpha2)
        for name, value in (("psi", self.psi), ("alpha1", self.alpha1), ("alpha2", self.alpha2)):
            if abs(value) >= 1:
                raise DomainError(f"Mobius-marginal model requires |{name}| < 1, got {abs(value):.6g}")


@dataclass
class VMCopulaParams:
    """BC+(psi) copula with von Mises marginals vM(mu1, kappa1), vM(mu2, kappa2)."""
    mu1: float
    mu2: float
    kappa1: float
    kappa2: float
    psi: complex

    def __post_init__(self):
        self.psi = complex(self.psi)
        if abs(self.psi) >= 1:
            raise DomainError(f"von Mises copula requires |psi| < 1, got {abs(self.psi):.6g}")
        if self.kappa1 < 0 or self.kappa2 < 0:
            raise DomainError("von Mises copula requires kappa1, kappa2 >= 0")
        self.mu1, self.mu2 = wrap_angle(float(self.mu1)), wrap_angle(float(self.mu2))

    @property
    def marginal_u(self) -> VonMisesParams:
        return VonMisesParams(self.mu1, self.kappa1)

    @property
    def marginal_v(self) -> VonMisesParams:
        return VonMisesParams(self.mu2, self.kappa2)


@dataclass
class SenGuptaParams:
    """Exponential family with von Mises conditionals; m[0, 0] is absorbed into the normalizer."""
    m: np.ndarray

    def __post_init__(self):
        self.m = np.array(self.m, dtype=float)
        if self.m.shape != (3, 3):
            raise DomainError(f"SenGupta model needs a 3x3 matrix, got shape {self.m.shape}")
        if not np.all(np.isfinite(self.m)):
            raise DomainError("SenGupta matrix entries must be finite")
        self.m[0, 0] = 0.0

    @classmethod
    def from_free(cls, values) -> "SenGuptaParams":
        m = np.zeros(9)
        m[1:] = np.asarray(values, dtype=float)
        return cls(m.reshape(3, 3))

    @property
    def free(self) -> np.ndarray:
        return self.m.reshape(-1)[1:].copy()


@dataclass
class ShiehJohnsonParams:
    """Wehrly-Johnson bivariate von Mises: marginals vM(mu1, kappa1), vM(mu2, kappa2), link vM(mu3, kappa3)."""
    mu1: float
    mu2: float
    mu3: float
    kappa1: float
    kappa2: float
    kappa3: float

    def __post_init__(self):
        if min(self.kappa1, self.kappa2, self.kappa3) < 0:
            raise DomainError("Shieh-Johnson model requires kappa_j >= 0")
        self.mu1, self.mu2, self.mu3 = (wrap_angle(float(m)) for m in (self.mu1, self.mu2, self.mu3))


@dataclass
class FitResult:
    """Maximum likelihood fit of a bivariate circular model."""
    model: str
    params: dict
    loglik: float
    k: int
    n: int
    converged: bool
    iterations: int
    starts: int = 1

    @property
    def aic(self) -> float:
        return 2 * self.k - 2 * self.loglik

    @property
    def bic(self) -> float:
        return self.k * math.log(self.n) - 2 * self.loglik

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "params": self.params,
            "loglik": self.loglik,
            "aic": self.aic,
            "bic": self.bic,
            "k": self.k,
            "n": self.n,
            "converged": self.converged,
            "iterations": self.iterations,
        }


@dataclass
class PathConfig:
    """Brownian path settings for the generative oracle."""
    d: int
    rho: float
    q: np.ndarray
    start: Optional[np.ndarray] = None
    dt: float = 1e-5
    max_steps: int = 5_000_000

    def __post_init__(self):
        self.q = as_orthogonal(self.q)
        if self.q.shape[0] != self.d:
            raise DomainError(f"Q has size {self.q.shape[0]} but d={self.d}")
        self.start = np.zeros(self.d) if self.start is None else np.asarray(self.start, dtype=float)
        if self.start.shape != (self.d,):
            raise DomainError(f"start must have length {self.d}")
        if not 0 < self.dt <= 1e-3:
            raise DomainError(f"dt must lie in (0, 1e-3], got {self.dt}")
        if not np.linalg.norm(self.start) < self.rho < 1:
            raise DomainError("path config requires ||start|| < rho < 1")
        if self.max_steps < 1:
            raise DomainError("max_steps must be positive")


@dataclass
class AngleDataset:
    """Pairs of angles (theta_u, theta_v) in radians on [0, 2 pi)."""
    theta_u: np.ndarray
    theta_v: np.ndarray
    source: Optional[Path] = None
    unit: AngleUnit = AngleUnit.RADIANS

    def __post_init__(self):
        self.theta_u = np.asarray(self.theta_u, dtype=float)
        self.theta_v = np.asarray(self.theta_v, dtype=float)
        if self.theta_u.shape != self.theta_v.shape or self.theta_u.ndim != 1:
            raise DomainError("theta_u and theta_v must be 1-D arrays of equal length")
        if not (np.all(np.isfinite(self.theta_u)) and np.all(np.isfinite(self.theta_v))):
            raise DomainError("angles must be finite")

    @property
    def n(self) -> int:
        return self.theta_u.size

    def as_circle_pairs(self) -> CirclePairSample:
        return CirclePairSample.from_angles(self.theta_u, self.theta_v)


@dataclass
class StudyGrid:
    """Design of the MoM-vs-MLE simulation study."""
    sample_sizes: list = field(default_factory=lambda: [10, 20, 30, 50, 100])
    psi_values: list = field(default_factory=lambda: [0.1, 0.3, 0.5, 0.7, 0.9])
    replicates: int = 2000
    seed: int = 20240607

    def __post_init__(self):
        if self.replicates < 1:
            raise DomainError("replicates must be >= 1")
        if not self.sample_sizes or min(self.sample_sizes) < 1:
            raise DomainError("sample sizes must be positive")
        if not self.psi_values or any(not 0 <= abs(p) < 1 for p in self.psi_values):
            raise DomainError("psi values must satisfy |psi| < 1")
