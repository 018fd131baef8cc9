"""Generalized complex tori, flat gerbes and their mirror objects, verified numerically."""

from .errors import GerbyMirrorError
from .matrix_kernel import DEFAULT_TOL, ToleranceConfig
from .torus_gcs import ComplexTorus, GeneralizedComplexStructure

__version__ = "0.1.0"

__all__ = ["ComplexTorus", "DEFAULT_TOL", "GeneralizedComplexStructure", "GerbyMirrorError", "ToleranceConfig"]
