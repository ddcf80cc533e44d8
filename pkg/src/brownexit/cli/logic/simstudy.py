"""Relative efficiency of the moment and maximum likelihood estimators of psi under BC+.

For every (n, psi) cell, ``replicates`` samples of size n are drawn; each cell owns the stream
(seed, (n index, psi index)), so results do not depend on how cells are spread over workers.
The reported value is MSE(moment estimator) / MSE(MLE); the n = infinity row is the ratio of
asymptotic variances, 1 / (1 - |psi|^2).
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from ...models import BCParams, StudyGrid
from ...stats.bc import bc_reduction, bc_sample
from ...stats.mathcore import RngStream
from ...stats.univariate import wrapped_cauchy_mle_batch

logger = logging.getLogger(__name__)

# Relative MSE values published for 2000 replicates per cell, keyed by (n, psi).
REFERENCE_RELATIVE_MSE: Dict[Tuple[float, float], float] = {
    (10, 0.1): 0.919, (10, 0.3): 0.998, (10, 0.5): 1.155, (10, 0.7): 1.620, (10, 0.9): 4.135,
    (20, 0.1): 0.963, (20, 0.3): 1.032, (20, 0.5): 1.221, (20, 0.7): 1.749, (20, 0.9): 4.767,
    (30, 0.1): 0.980, (30, 0.3): 1.071, (30, 0.5): 1.229, (30, 0.7): 1.795, (30, 0.9): 4.942,
    (50, 0.1): 0.977, (50, 0.3): 1.059, (50, 0.5): 1.306, (50, 0.7): 1.827, (50, 0.9): 5.039,
    (100, 0.1): 0.992, (100, 0.3): 1.105, (100, 0.5): 1.311, (100, 0.7): 1.891, (100, 0.9): 5.088,
    (math.inf, 0.1): 1.010, (math.inf, 0.3): 1.099, (math.inf, 0.5): 1.333,
    (math.inf, 0.7): 1.961, (math.inf, 0.9): 5.263,
}


def analytic_relative_mse(psi: float) -> float:
    """Limit of the ratio as n grows: (1 - |psi|^2) / (1 - |psi|^2)^2."""
    return 1.0 / (1.0 - abs(psi) ** 2)


def reference_value(n: float, psi: float) -> Optional[float]:
    return REFERENCE_RELATIVE_MSE.get((n, round(float(psi), 10)))


@dataclass
class CellResult:
    n: int
    psi: float
    mse_moment: float
    mse_mle: float
    boundary: int
    unconverged: int

    @property
    def ratio(self) -> float:
        return self.mse_moment / self.mse_mle


def run_cell(seed: int, n_index: int, psi_index: int, n: int, psi: float, replicates: int) -> CellResult:
    """One grid cell: ``replicates`` BC+(psi) samples of size n drawn in a single batch."""
    rng = RngStream(seed, (n_index, psi_index))
    s = bc_sample(BCParams(psi), replicates * n, rng)
    w = bc_reduction(s).reshape(replicates, n)

    moment = w.mean(axis=1)
    mle, converged, at_boundary, _ = wrapped_cauchy_mle_batch(w)

    cell = CellResult(
        n=n,
        psi=psi,
        mse_moment=float(np.mean(np.abs(moment - psi) ** 2)),
        mse_mle=float(np.mean(np.abs(mle - psi) ** 2)),
        boundary=int(at_boundary.sum()),
        unconverged=int((~converged).sum()),
    )
    if cell.boundary:
        logger.debug(f"cell n={n}, psi={psi}: {cell.boundary} boundary estimate(s)")
    return cell


@dataclass
class StudyTable:
    grid: StudyGrid
    cells: List[CellResult]

    def cell(self, n: int, psi: float) -> CellResult:
        for c in self.cells:
            if c.n == n and c.psi == psi:
                return c
        raise KeyError((n, psi))

    def ratio_rows(self) -> List[Tuple[float, List[float]]]:
        """(n, ratios by psi) for every sample size, then (inf, analytic ratios)."""
        rows = [(n, [self.cell(n, psi).ratio for psi in self.grid.psi_values]) for n in self.grid.sample_sizes]
        rows.append((math.inf, [analytic_relative_mse(psi) for psi in self.grid.psi_values]))
        return rows

    def csv_columns(self) -> Tuple[List[str], List[np.ndarray]]:
        rows = self.ratio_rows()
        header = ["n"] + [format(float(psi), "g") for psi in self.grid.psi_values]
        columns = [np.array([n for n, _ in rows], dtype=float)]
        for j in range(len(self.grid.psi_values)):
            columns.append(np.array([ratios[j] for _, ratios in rows]))
        return header, columns

    def to_dict(self) -> dict:
        cells = []
        for c in self.cells:
            published = reference_value(c.n, c.psi)
            cells.append({
                "n": c.n,
                "psi": c.psi,
                "mse_moment": c.mse_moment,
                "mse_mle": c.mse_mle,
                "relative_mse": c.ratio,
                "published": published,
                "relative_deviation": None if published is None else c.ratio / published - 1,
                "boundary_estimates": c.boundary,
                "unconverged": c.unconverged,
            })
        return {
            "sample_sizes": list(self.grid.sample_sizes),
            "psi_values": list(self.grid.psi_values),
            "replicates": self.grid.replicates,
            "cells": cells,
            "analytic": {format(float(p), "g"): analytic_relative_mse(p) for p in self.grid.psi_values},
        }


def run_study(grid: StudyGrid, workers: int = 1) -> StudyTable:
    """All cells of the grid, serially or on a process pool."""
    tasks = [
        (grid.seed, i, j, n, float(psi), grid.replicates)
        for i, n in enumerate(grid.sample_sizes)
        for j, psi in enumerate(grid.psi_values)
    ]
    logger.info(f"simulation study: {len(tasks)} cells x {grid.replicates} replicates on {workers} worker(s)")

    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(run_cell, *zip(*tasks)))
    else:
        cells = [run_cell(*task) for task in tasks]
    return StudyTable(grid, cells)
