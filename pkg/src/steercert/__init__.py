"""Certification toolkit for boundary-contact entanglement and steering."""

from .linalg import DensityMatrix, Tolerances, DEFAULT_TOL

__version__ = "0.1.0"

__all__ = ["DensityMatrix", "Tolerances", "DEFAULT_TOL", "__version__"]
