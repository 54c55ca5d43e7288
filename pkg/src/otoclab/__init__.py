"""Numerical laboratory for information scrambling in weakly coupled
bipartite chaotic systems: coupled kicked rotors, their random-matrix
counterpart, classical tangent dynamics and phase-space delocalization."""

__version__ = "0.1.0"

from .operators import OperatorMatrix, SystemParams
from .otoc import FitResult, OtocSeries

__all__ = [
    "OperatorMatrix",
    "SystemParams",
    "OtocSeries",
    "FitResult",
    "__version__",
]
