"""Fit the bivariate circular models to an angle dataset and rank them by AIC/BIC."""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from ...models import AngleDataset, FitResult
from ...stats.circular_fits import MIN_FIT_SIZE, MODEL_NAMES, FitOptions, Ranking, fit_model, model_select
from ...stats.mathcore import NumericalError
from ..core.exceptions import UsageError

logger = logging.getLogger(__name__)


@dataclass
class FitSummary:
    """Per-model results, failures and the ranking of the successful fits."""
    n: int
    fits: List[FitResult] = field(default_factory=list)
    failures: Dict[str, str] = field(default_factory=dict)
    ranking: Optional[Ranking] = None

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "fits": [f.to_dict() for f in self.fits],
            "failures": self.failures,
            "ranking": self.ranking.rows() if self.ranking else [],
            "best_aic": self.ranking.best.model if self.ranking else None,
            "best_bic": self.ranking.by_bic[0].model if self.ranking else None,
        }


def parse_models(text: str) -> List[str]:
    names = [m.strip() for m in (text or "").split(",") if m.strip()]
    if not names:
        raise UsageError("--models needs at least one model")
    unknown = [m for m in names if m not in MODEL_NAMES]
    if unknown:
        raise UsageError(f"unknown model(s) {', '.join(unknown)}; choose from {', '.join(MODEL_NAMES)}")
    return list(dict.fromkeys(names))


def run_fits(dataset: AngleDataset, models: Sequence[str], options: FitOptions) -> FitSummary:
    """Fit every model; a failing model is recorded and the others still run."""
    if dataset.n < MIN_FIT_SIZE:
        raise UsageError(f"model fits need at least {MIN_FIT_SIZE} pairs, the dataset has {dataset.n}")

    summary = FitSummary(n=dataset.n)
    for name in models:
        try:
            fit = fit_model(name, dataset.theta_u, dataset.theta_v, options)
        except NumericalError as e:
            logger.warning(f"{name} fit failed: {e}")
            summary.failures[name] = f"{type(e).__name__}: {e}"
            continue
        logger.info(f"{name}: loglik {fit.loglik:.3f}, AIC {fit.aic:.2f}, BIC {fit.bic:.2f}")
        summary.fits.append(fit)

    if summary.fits:
        summary.ranking = model_select(summary.fits)
    return summary
