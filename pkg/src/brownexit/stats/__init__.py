"""Distribution families, estimators and numerical routines."""

from .mathcore import (
    BracketError,
    DomainError,
    EstimationError,
    NumericalError,
    QuadratureError,
    RngStream,
    SearchError,
    SimulationError,
)

__all__ = [
    "BracketError",
    "DomainError",
    "EstimationError",
    "NumericalError",
    "QuadratureError",
    "RngStream",
    "SearchError",
    "SimulationError",
]
