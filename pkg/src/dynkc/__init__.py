"""Fully dynamic k-center clustering with an ensemble of offset navigating nets."""

from .engine import Engine, EnsembleConfig, InfeasibleParameters, Solution, approximation_ratio, derive_parameters
from .metric import EuclideanMetric, PointRecord, RejectedInput, distance
from .navnet import Mode, NavigatingNet, NetConfig, ValidationReport

__version__ = "0.1.0"

__all__ = [
    "Engine", "EnsembleConfig", "InfeasibleParameters", "Solution", "approximation_ratio", "derive_parameters",
    "EuclideanMetric", "PointRecord", "RejectedInput", "distance", "Mode", "NavigatingNet", "NetConfig",
    "ValidationReport",
]
