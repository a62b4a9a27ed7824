"""First-passage analytics and simulation for a network under marked Poisson attack."""

from .model import CrossingRecord, ModelParams, SummaryStats, validate_params

__all__ = ["CrossingRecord", "ModelParams", "SummaryStats", "validate_params"]
__version__ = "0.1.0"
