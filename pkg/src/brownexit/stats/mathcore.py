"""Numerical core: special functions, quadrature, root finding, simplex search and seeded streams.

Every other module in ``brownexit.stats`` consumes these wrappers rather than calling
scipy directly, so domain checks and error types stay uniform across the package.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy import integrate, optimize, special

logger = logging.getLogger(__name__)


class NumericalError(Exception):
    """Base class for numerical failures raised by brownexit."""
    pass


class DomainError(NumericalError, ValueError):
    """Argument outside the domain of a function or parameter space."""
    pass


class QuadratureError(NumericalError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class BracketError(NumericalError):
    """Root search interval does not bracket a sign change."""
    pass


class SearchError(NumericalError):
    """Simplex search hit a non-finite objective value."""

    def __init__(self, message: str, trace: list):
        super().__init__(message)
        self.trace = trace


class EstimationError(NumericalError):
    """An estimator could not be evaluated or did not converge."""

    def __init__(self, message: str, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class SimulationError(NumericalError):
    """A path simulation exceeded its step budget."""

    def __init__(self, message: str, steps: int):
        super().__init__(message)
        self.steps = steps


StreamId = Union[int, Sequence[int]]


class RngStream:
    """Seeded random stream.

    Identical ``(seed, stream_id)`` pairs reproduce the same sequence; distinct stream ids
    give independent sequences via ``SeedSequence`` spawn keys. A stream is single-owner:
    parallel callers derive children with :meth:`child` instead of sharing one instance.
    """

    def __init__(self, seed: int, stream_id: StreamId = 0):
        if seed < 0:
            raise DomainError(f"seed must be non-negative, got {seed}")
        if isinstance(stream_id, (int, np.integer)):
            key = (int(stream_id),)
        else:
            key = tuple(int(s) for s in stream_id)
        self.seed = int(seed)
        self.stream_id = key
        self.generator = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=key))
        )

    def child(self, *stream_id: int) -> "RngStream":
        """Independent stream keyed below this one."""
        return RngStream(self.seed, self.stream_id + tuple(stream_id))

    def uniform(self, size=None):
        return self.generator.random(size)

    def gaussian(self, size=None):
        return self.generator.standard_normal(size)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


def rng_uniform(stream: RngStream, size=None):
    """Uniform variate(s) on [0, 1)."""
    return stream.uniform(size)


def rng_gaussian(stream: RngStream, size=None):
    """Standard normal variate(s)."""
    return stream.gaussian(size)


@dataclass(frozen=True)
class QuadratureResult:
    """Value of a one-dimensional integral with the rule's own error estimate."""
    value: float
    error: float
    evaluations: int


def log_gamma(x):
    """ln Gamma(x) for x > 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("log_gamma requires x > 0")
    out = special.gammaln(x)
    return float(out) if out.ndim == 0 else out


def beta_fn(a: float, b: float) -> float:
    """Complete beta function B(a, b)."""
    if a <= 0 or b <= 0:
        raise DomainError(f"beta_fn requires a, b > 0, got ({a}, {b})")
    return float(special.beta(a, b))


def log_beta(a: float, b: float) -> float:
    if a <= 0 or b <= 0:
        raise DomainError(f"log_beta requires a, b > 0, got ({a}, {b})")
    return float(special.betaln(a, b))


def reg_inc_beta(x, a: float, b: float):
    """Regularized incomplete beta I_x(a, b)."""
    x = np.asarray(x, dtype=float)
    if a <= 0 or b <= 0:
        raise DomainError(f"reg_inc_beta requires a, b > 0, got ({a}, {b})")
    if np.any((x < 0) | (x > 1)):
        raise DomainError("reg_inc_beta requires 0 <= x <= 1")
    out = special.betainc(a, b, x)
    return float(out) if out.ndim == 0 else out


def bessel_i0(kappa):
    """Modified Bessel function of the first kind, order zero."""
    kappa = np.asarray(kappa, dtype=float)
    if np.any(kappa < 0):
        raise DomainError("bessel_i0 requires kappa >= 0")
    out = special.i0(kappa)
    return float(out) if out.ndim == 0 else out


def log_bessel_i0(kappa):
    """ln I0(kappa), finite for large kappa where I0 itself overflows."""
    kappa = np.asarray(kappa, dtype=float)
    if np.any(kappa < 0):
        raise DomainError("log_bessel_i0 requires kappa >= 0")
    out = np.log(special.i0e(kappa)) + kappa
    return float(out) if out.ndim == 0 else out


def bessel_ratio(kappa):
    """A1(kappa) = I1(kappa) / I0(kappa), the mean resultant length of vM(., kappa)."""
    kappa = np.asarray(kappa, dtype=float)
    out = special.i1e(kappa) / special.i0e(kappa)
    return float(out) if out.ndim == 0 else out


def bessel_ratio_inverse(r: float) -> float:
    """Inverse of A1 on [0, 1).

    The Best and Fisher piecewise formula gives the starting bracket; Brent's method on
    ``bessel_ratio`` finishes it.
    """
    if not 0 <= r < 1:
        raise DomainError(f"bessel_ratio_inverse requires 0 <= r < 1, got {r}")
    if r == 0:
        return 0.0
    if r < 0.53:
        guess = 2 * r + r ** 3 + 5 * r ** 5 / 6
    elif r < 0.85:
        guess = -0.4 + 1.39 * r + 0.43 / (1 - r)
    else:
        guess = 1 / (r ** 3 - 4 * r ** 2 + 3 * r)
    hi = max(2 * guess, 1.0)
    while bessel_ratio(hi) < r:
        hi *= 2
    return find_root(lambda k: bessel_ratio(k) - r, 0.0, hi)


def log_sphere_area(d: int) -> float:
    """ln A_{d-1}, the surface area of the unit sphere S^{d-1} in R^d."""
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    return math.log(2.0) + 0.5 * d * math.log(math.pi) - log_gamma(0.5 * d)


def quad_1d(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-10,
    limit: int = 200,
) -> QuadratureResult:
    """Adaptive Gauss-Kronrod quadrature of ``f`` over [a, b].

    Raises:
        QuadratureError: if the rule reports trouble and its error estimate exceeds ``tol``
    """
    result = integrate.quad(f, a, b, epsabs=tol, epsrel=tol, limit=limit, full_output=1)
    value, error, info = result[:3]
    if len(result) > 3 and error > tol:
        raise QuadratureError(
            f"quadrature did not converge on [{a}, {b}]: {result[3]}", value, error
        )
    return QuadratureResult(value=float(value), error=float(error), evaluations=int(info["neval"]))


def torus_trapezoid(f: Callable, n: int) -> float:
    """Composite trapezoid rule on an n x n grid over [0, 2pi)^2.

    ``f`` receives broadcastable angle arrays. For periodic integrands the rule reduces to
    the mean of the grid values times 4 pi^2.
    """
    t = 2 * np.pi * np.arange(n) / n
    tu, tv = np.meshgrid(t, t, indexing="ij")
    values = np.asarray(f(tu, tv), dtype=float)
    return float(values.mean() * 4 * np.pi ** 2)


def quad_torus_2d(f: Callable, n: int = 64, rtol: float = 1e-9, max_n: int = 2048) -> float:
    """Integral of a smooth 2 pi-periodic function over the torus, doubling the grid.

    Starts at an ``n`` x ``n`` grid and doubles until consecutive values agree to ``rtol``.
    """
    value = torus_trapezoid(f, n)
    while n < max_n:
        n *= 2
        refined = torus_trapezoid(f, n)
        if abs(refined - value) <= rtol * max(abs(refined), 1e-300):
            return refined
        value = refined
    logger.warning(f"Torus quadrature stopped at {max_n}x{max_n} grid before reaching rtol={rtol}")
    return value


def find_root(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12) -> float:
    """Root of ``f`` in [lo, hi] by Brent's method (bisection with secant/inverse-quadratic steps).

    Raises:
        BracketError: if f(lo) and f(hi) have the same strict sign
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if flo * fhi > 0:
        raise BracketError(f"no sign change on [{lo}, {hi}]: f(lo)={flo:.3g}, f(hi)={fhi:.3g}")
    return float(optimize.brentq(f, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=500))


def invert_cdf(
    cdf: Callable[[np.ndarray], np.ndarray],
    pdf: Callable[[np.ndarray], np.ndarray],
    u,
    lo: float,
    hi: float,
    tol: float = 1e-12,
    grid: int = 2049,
    newton_steps: int = 8,
):
    """Vectorized inverse of a continuous increasing CDF on [lo, hi].

    A tabulated CDF gives starting points and brackets; safeguarded Newton steps then refine
    each value. Entries that fail to settle fall back to :func:`find_root`.
    """
    u = np.asarray(u, dtype=float)
    xs = np.linspace(lo, hi, grid)
    fs = cdf(xs)
    x = np.interp(u, fs, xs)
    idx = np.clip(np.searchsorted(fs, u), 1, grid - 1)
    left, right = xs[idx - 1], xs[idx]
    for _ in range(newton_steps):
        density = pdf(x)
        step = (cdf(x) - u) / np.where(density > 0, density, np.inf)
        x = np.clip(x - step, left, right)
    residual = np.abs(cdf(x) - u)
    unsettled = np.flatnonzero(residual > tol)
    for i in unsettled.flat:
        target = u.flat[i]
        x.flat[i] = find_root(lambda s: float(cdf(np.asarray(s))) - target, left.flat[i], right.flat[i])
    if unsettled.size:
        logger.debug(f"invert_cdf: {unsettled.size} values refined by bracketing search")
    return float(x) if x.ndim == 0 else x


@dataclass
class SimplexResult:
    """Outcome of a Nelder-Mead search."""
    argmin: np.ndarray
    value: float
    converged: bool
    iterations: int
    evaluations: int


def nelder_mead(
    objective: Callable[[np.ndarray], float],
    x0,
    xatol: float = 1e-8,
    fatol: float = 1e-12,
    max_iterations: Optional[int] = None,
    initial_step: float = 0.05,
) -> SimplexResult:
    """Derivative-free simplex minimization.

    Stops when the simplex diameter falls below ``xatol`` (and the spread of objective values
    below ``fatol``) or after ``max_iterations``.

    Raises:
        DomainError: if the objective is not finite at ``x0``
        SearchError: if a non-finite objective value is met during the search
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    f0 = objective(x0)
    if not np.isfinite(f0):
        raise DomainError(f"objective is not finite at the starting point {x0.tolist()}")

    trace = []

    def guarded(x):
        value = objective(x)
        trace.append((x.copy(), value))
        if len(trace) > 50:
            del trace[0]
        if not np.isfinite(value):
            raise SearchError(f"objective returned {value} at {x.tolist()}", list(trace))
        return value

    simplex = [x0]
    for i in range(x0.size):
        vertex = x0.copy()
        vertex[i] = vertex[i] + initial_step if vertex[i] == 0 else vertex[i] * (1 + initial_step)
        simplex.append(vertex)

    options = {
        "xatol": xatol,
        "fatol": fatol,
        "initial_simplex": np.array(simplex),
        "maxiter": max_iterations or 400 * x0.size,
        "maxfev": 10 * (max_iterations or 400 * x0.size),
    }
    result = optimize.minimize(guarded, x0, method="Nelder-Mead", options=options)
    if not result.success:
        logger.debug(f"Nelder-Mead stopped without convergence: {result.message}")
    return SimplexResult(
        argmin=np.asarray(result.x, dtype=float),
        value=float(result.fun),
        converged=bool(result.success),
        iterations=int(result.nit),
        evaluations=int(result.nfev),
    )


def top_eigenvalue_sym(m) -> float:
    """Largest eigenvalue of a symmetric matrix."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {m.shape}")
    if not np.allclose(m, m.T, atol=1e-10 * max(1.0, np.abs(m).max())):
        raise DomainError("top_eigenvalue_sym requires a symmetric matrix")
    if not np.any(m):
        return 0.0
    return float(np.linalg.eigvalsh(0.5 * (m + m.T))[-1])
