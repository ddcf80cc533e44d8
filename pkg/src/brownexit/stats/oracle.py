"""Brownian-path oracle for the generative construction.

A Brownian motion started at ``start`` inside the radius-rho sphere is run with Euler steps of
size ``dt``. The first exit from the radius-rho sphere gives U = Q B_tau1 / ||B_tau1||, the
subsequent exit from the unit sphere gives V = B_tau2. Crossings are located by intersecting
the last step's segment with the sphere, then projected onto it.

The oracle draws from its own streams and never calls the closed-form samplers for the pairs it
validates.
"""

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import stats as sps

from ..models import BSParams, ExitParams, HPrimeParams, PairSample, PathConfig, ShiftedParams, WrappedCauchyParams
from .bs import t_cdf
from .bc import vectors_to_circle
from .extended import circle_angles, shifted_sample
from .mathcore import DomainError, RngStream, SimulationError
from .univariate import TestResult, exit_sample, histogram_chi_square, hprime_mean, ks_test, wrapped_cauchy_cdf

logger = logging.getLogger(__name__)

ORACLE_STREAM = 7
PATH_PURPOSE, BIAS_PURPOSE, REFERENCE_PURPOSE = 0, 1, 2

# Expected overshoot of a discretely monitored Brownian motion over a barrier, in units of sqrt(dt)
OVERSHOOT_CONSTANT = 0.5826
BIAS_SUBSTEPS = 4
HISTOGRAM_BINS = 20


def _crossing_fraction(old: np.ndarray, new: np.ndarray, radius: float) -> np.ndarray:
    """Smallest t in [0, 1] with ||old + t (new - old)|| = radius, for ||old|| < radius <= ||new||."""
    delta = new - old
    a = np.einsum("ij,ij->i", delta, delta)
    b = 2 * np.einsum("ij,ij->i", old, delta)
    c = np.einsum("ij,ij->i", old, old) - radius ** 2
    t = (-b + np.sqrt(np.maximum(b * b - 4 * a * c, 0.0))) / (2 * a)
    return np.clip(t, 0.0, 1.0)


class _PathBatch:
    """State of m independent paths: position, stage (0 inside rho, 1 inside 1, 2 done), exits."""

    def __init__(self, cfg: PathConfig, m: int):
        self.cfg = cfg
        self.position = np.tile(cfg.start, (m, 1))
        self.stage = np.zeros(m, dtype=np.int8)
        self.steps = np.zeros(m, dtype=np.int64)
        self.exit_inner = np.zeros((m, cfg.d))
        self.exit_outer = np.zeros((m, cfg.d))
        self.time_inner = np.zeros(m)
        self.time_outer = np.zeros(m)

    @property
    def running(self) -> np.ndarray:
        return self.stage < 2

    def advance(self, rows: np.ndarray, increments: np.ndarray):
        """Move ``rows`` by ``increments``; rows that already finished are skipped."""
        keep = self.stage[rows] < 2
        rows, increments = rows[keep], increments[keep]
        if rows.size == 0:
            return
        old = self.position[rows]
        new = old + increments
        self.steps[rows] += 1
        radius = np.linalg.norm(new, axis=1)

        hit = (self.stage[rows] == 0) & (radius >= self.cfg.rho)
        if np.any(hit):
            idx = rows[hit]
            t = _crossing_fraction(old[hit], new[hit], self.cfg.rho)
            point = old[hit] + t[:, None] * (new[hit] - old[hit])
            self.exit_inner[idx] = point / np.linalg.norm(point, axis=1, keepdims=True)
            self.time_inner[idx] = self.steps[idx] - 1 + t
            self.stage[idx] = 1

        hit = (self.stage[rows] == 1) & (radius >= 1.0)
        if np.any(hit):
            idx = rows[hit]
            t = _crossing_fraction(old[hit], new[hit], 1.0)
            point = old[hit] + t[:, None] * (new[hit] - old[hit])
            self.exit_outer[idx] = point / np.linalg.norm(point, axis=1, keepdims=True)
            self.time_outer[idx] = self.steps[idx] - 1 + t
            self.stage[idx] = 2

        self.position[rows] = new
        if np.any(self.steps[rows] >= self.cfg.max_steps):
            late = rows[self.steps[rows] >= self.cfg.max_steps]
            raise SimulationError(
                f"{late.size} path(s) still inside after {self.cfg.max_steps} steps",
                int(self.cfg.max_steps),
            )

    def pairs(self) -> PairSample:
        if np.any(self.time_inner >= self.time_outer):
            raise SimulationError("exit from the inner sphere must precede exit from the unit sphere", int(self.steps.max()))
        return PairSample(self.exit_inner @ self.cfg.q.T, self.exit_outer)


def _run_batch(cfg: PathConfig, m: int, rng: RngStream) -> PairSample:
    batch = _PathBatch(cfg, m)
    scale = math.sqrt(cfg.dt)
    rows = np.arange(m)
    while rows.size:
        batch.advance(rows, scale * rng.gaussian((rows.size, cfg.d)))
        rows = rows[batch.running[rows]]
    return batch.pairs()


def simulate_exit_pair(cfg: PathConfig, rng: RngStream):
    """One path; returns (u, v), both unit vectors.

    Raises:
        SimulationError: if the path has not left the unit ball after ``cfg.max_steps`` steps
    """
    s = _run_batch(cfg, 1, rng)
    return s.u[0], s.v[0]


def _simulate_chunk(cfg: PathConfig, m: int, seed: int, chunk: int) -> PairSample:
    return _run_batch(cfg, m, RngStream(seed, (ORACLE_STREAM, PATH_PURPOSE, chunk)))


def simulate_exit_pairs(cfg: PathConfig, n: int, seed: int, workers: int = 1, chunk_size: int = 1024) -> PairSample:
    """n paths in chunks; chunk c always uses stream (seed, c), so the result does not depend on ``workers``."""
    if n < 1:
        raise DomainError(f"number of paths must be >= 1, got {n}")
    sizes = [min(chunk_size, n - start) for start in range(0, n, chunk_size)]
    chunks = list(range(len(sizes)))
    logger.debug(f"oracle: {n} paths in {len(sizes)} chunk(s) on {workers} worker(s), dt={cfg.dt}")

    if workers > 1 and len(sizes) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_simulate_chunk, [cfg] * len(sizes), sizes, [seed] * len(sizes), chunks))
    else:
        parts = [_simulate_chunk(cfg, m, seed, c) for m, c in zip(sizes, chunks)]
    return PairSample(np.vstack([p.u for p in parts]), np.vstack([p.v for p in parts]))


@dataclass
class BiasCheck:
    """Shift of mean(u'Qv) between step sizes dt and dt/4 on coupled paths."""
    dt: float
    paths: int
    mean_coarse: float
    mean_fine: float
    shift: float
    predicted: float
    standard_error: float

    @property
    def within_model(self) -> bool:
        return abs(self.shift) <= 2 * self.predicted + 3 * self.standard_error

    def to_dict(self) -> dict:
        return {
            "dt": self.dt,
            "dt_fine": self.dt / BIAS_SUBSTEPS,
            "paths": self.paths,
            "mean_coarse": self.mean_coarse,
            "mean_fine": self.mean_fine,
            "shift": self.shift,
            "predicted_shift": self.predicted,
            "standard_error": self.standard_error,
            "within_model": self.within_model,
        }


def predicted_bias(cfg: PathConfig, dt: Optional[float] = None) -> float:
    """Bias of mean(u'Qv) from both barriers moving out by the mean overshoot: c (1 - rho) sqrt(dt)."""
    dt = cfg.dt if dt is None else dt
    return OVERSHOOT_CONSTANT * (1 - cfg.rho) * math.sqrt(dt)


def discretization_bias(cfg: PathConfig, paths: int, seed: int) -> BiasCheck:
    """Run the same increments at dt/4 and, summed in groups of four, at dt."""
    rng = RngStream(seed, (ORACLE_STREAM, BIAS_PURPOSE))
    coarse = _PathBatch(cfg, paths)
    fine = _PathBatch(cfg, paths)
    scale = math.sqrt(cfg.dt / BIAS_SUBSTEPS)
    rows = np.arange(paths)
    while rows.size:
        increments = scale * rng.gaussian((rows.size, BIAS_SUBSTEPS, cfg.d))
        for k in range(BIAS_SUBSTEPS):
            fine.advance(rows, increments[:, k])
        coarse.advance(rows, increments.sum(axis=1))
        rows = rows[coarse.running[rows] | fine.running[rows]]

    x_coarse = coarse.pairs().inner(cfg.q)
    x_fine = fine.pairs().inner(cfg.q)
    diff = x_coarse - x_fine
    se = float(diff.std(ddof=1) / math.sqrt(paths)) if paths > 1 else float("nan")
    return BiasCheck(
        dt=cfg.dt,
        paths=paths,
        mean_coarse=float(x_coarse.mean()),
        mean_fine=float(x_fine.mean()),
        shift=float(diff.mean()),
        predicted=predicted_bias(cfg) - predicted_bias(cfg, cfg.dt / BIAS_SUBSTEPS),
        standard_error=se,
    )


@dataclass
class OracleReport:
    """Agreement of simulated paths with the closed-form model."""
    d: int
    rho: float
    dt: float
    start: list
    paths: int
    mean_inner: float
    mean_inner_se: float
    inner_ks: TestResult
    outer_marginal_ks: TestResult
    inner_chi_square: Optional[TestResult] = None
    bias: Optional[BiasCheck] = None

    def to_dict(self) -> dict:
        out = {
            "d": self.d,
            "rho": self.rho,
            "dt": self.dt,
            "start": self.start,
            "paths": self.paths,
            "mean_inner": self.mean_inner,
            "mean_inner_se": self.mean_inner_se,
            "expected_mean_inner": hprime_mean(HPrimeParams(self.rho, 0.5 * (self.d - 2))),
            "inner_ks": self.inner_ks._asdict(),
            "outer_marginal_ks": self.outer_marginal_ks._asdict(),
            "inner_chi_square": self.inner_chi_square._asdict() if self.inner_chi_square else None,
            "bias": self.bias.to_dict() if self.bias else None,
        }
        return out


def _tabulated_cdf(cdf, points: int = 1025):
    """Linear interpolation of ``cdf`` on a grid uniform in angle over [-1, 1]."""
    grid = -np.cos(np.linspace(0.0, math.pi, points))
    values = np.asarray(cdf(grid), dtype=float)
    return lambda x: np.interp(np.asarray(x, dtype=float), grid, values)


def _empirical_cdf(reference: np.ndarray):
    reference = np.sort(reference)
    return lambda x: np.searchsorted(reference, np.asarray(x, dtype=float), side="right") / reference.size


def oracle_compare(
    cfg: PathConfig,
    n: int,
    seed: int,
    workers: int = 1,
    chunk_size: int = 1024,
    bias_paths: int = 0,
    reference_size: Optional[int] = None,
) -> OracleReport:
    """Simulate n paths and test them against the model.

    From the origin, u'Qv is tested against its H' law directly; from a shifted start, against a
    Monte Carlo reference drawn with the shifted-start sampler. The V marginal is tested against
    Exit_d(start). For d = 2 a chi-square test over an angular grid of u'Qv is added. With
    ``bias_paths > 0`` the dt versus dt/4 discretization check is run on that many coupled paths.
    """
    started = time.perf_counter()
    s = simulate_exit_pairs(cfg, n, seed, workers, chunk_size)
    x = s.inner(cfg.q)
    from_origin = not np.any(cfg.start)

    if from_origin:
        model = BSParams(cfg.rho, cfg.q)
        inner_cdf = _tabulated_cdf(lambda t: t_cdf(t, model))
    else:
        m = reference_size or max(10 * n, 20_000)
        reference = shifted_sample(
            ShiftedParams(cfg.rho, cfg.q, cfg.start), m, RngStream(seed, (ORACLE_STREAM, REFERENCE_PURPOSE))
        )
        inner_cdf = _empirical_cdf(reference.inner(cfg.q))
    inner_ks = ks_test(x, inner_cdf)

    if cfg.d == 2:
        angles = circle_angles(vectors_to_circle(s.v))
        exit_law = WrappedCauchyParams(complex(cfg.start[0], cfg.start[1]))
        outer_ks = ks_test(angles, lambda t: wrapped_cauchy_cdf(t, exit_law))
        edges = np.cos(np.linspace(math.pi, 0.0, HISTOGRAM_BINS + 1))
        edges[0], edges[-1] = -1.0, 1.0
        chi_square = histogram_chi_square(x, inner_cdf, edges)
    else:
        reference_v = exit_sample(ExitParams(cfg.start), RngStream(seed, (ORACLE_STREAM, REFERENCE_PURPOSE, 1)), size=max(10 * n, 20_000))
        result = sps.ks_2samp(s.v[:, 0], reference_v[:, 0])
        outer_ks = TestResult(float(result.statistic), float(result.pvalue))
        chi_square = None

    bias = discretization_bias(cfg, bias_paths, seed) if bias_paths > 0 else None
    if bias is not None and not bias.within_model:
        logger.warning(f"dt shift {bias.shift:.3g} exceeds twice the predicted {bias.predicted:.3g}")

    se = float(x.std(ddof=1) / math.sqrt(n)) if n > 1 else float("nan")
    logger.info(f"oracle: {n} paths, mean u'Qv {x.mean():.4f} +- {se:.4f} in {time.perf_counter() - started:.1f}s")
    return OracleReport(
        d=cfg.d,
        rho=cfg.rho,
        dt=cfg.dt,
        start=[float(c) for c in cfg.start],
        paths=n,
        mean_inner=float(x.mean()),
        mean_inner_se=se,
        inner_ks=inner_ks,
        outer_marginal_ks=outer_ks,
        inner_chi_square=chi_square,
        bias=bias,
    )
