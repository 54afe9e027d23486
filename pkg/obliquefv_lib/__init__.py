from .core.config import ExperimentConfig
from .study import ObliqueStudy, run_study

__all__ = ["ObliqueStudy", "ExperimentConfig", "run_study"]
