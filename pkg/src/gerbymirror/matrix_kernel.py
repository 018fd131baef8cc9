"""Small dense matrix predicates, Pfaffians and phases.

Every comparison takes an explicit :class:`ToleranceConfig`; there is no
module-level epsilon.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import IndeterminatePhase, NotAntisymmetric, NotSymmetric, ShapeError

MAX_PFAFFIAN_ORDER = 8


@dataclass(frozen=True)
class ToleranceConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-9
    phase_tol: float = 1e-9

    def __post_init__(self):
        for name in ("abs_tol", "rel_tol", "phase_tol"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be a positive finite number, got {v!r}")


DEFAULT_TOL = ToleranceConfig()


def as_matrix(m, dtype=None):
    arr = np.asarray(m, dtype=dtype)
    if arr.ndim != 2:
        raise ShapeError(f"expected a 2-d matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ShapeError("matrix has non-finite entries")
    return arr


def _square(m):
    arr = as_matrix(m)
    if arr.shape[0] != arr.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {arr.shape}")
    return arr


def asymmetry(m):
    """max |M - M^t| entry."""
    arr = _square(m)
    return float(np.max(np.abs(arr - arr.T))) if arr.size else 0.0


def is_symmetric(m, tol=DEFAULT_TOL):
    return asymmetry(m) <= tol.abs_tol


def is_antisymmetric(m, tol=DEFAULT_TOL):
    arr = _square(m)
    return (float(np.max(np.abs(arr + arr.T))) if arr.size else 0.0) <= tol.abs_tol


def min_eigenvalue(m, tol=DEFAULT_TOL):
    """Smallest eigenvalue of a (numerically) symmetric real matrix."""
    arr = _square(m)
    if np.iscomplexobj(arr):
        raise ShapeError("positive definiteness is defined here for real matrices only")
    if not is_symmetric(arr, tol):
        raise NotSymmetric(f"matrix is not symmetric (asymmetry {asymmetry(arr):.3e})")
    return float(np.linalg.eigvalsh(0.5 * (arr + arr.T))[0])


def is_positive_definite(m, tol=DEFAULT_TOL):
    return min_eigenvalue(m, tol) > tol.abs_tol


def pfaffian(m, tol=DEFAULT_TOL, backend=None):
    """Pfaffian by recursive first-row expansion, for orders 0..8."""
    arr = _square(m).astype(np.complex128)
    order = arr.shape[0]
    if order % 2:
        raise ShapeError(f"Pfaffian needs even order, got {order}")
    if order > MAX_PFAFFIAN_ORDER:
        raise ShapeError(f"Pfaffian order capped at {MAX_PFAFFIAN_ORDER}, got {order}")
    if not is_antisymmetric(arr, tol):
        raise NotAntisymmetric("Pfaffian input is not antisymmetric")
    return kernels.pfaffian_expand(arr, backend=backend)


def phase_mod_pi(z, tol=DEFAULT_TOL):
    """The unique theta in [0, pi) with Im(exp(i theta) z) = 0."""
    z = complex(z)
    if abs(z) <= tol.abs_tol:
        raise IndeterminatePhase(f"|z| = {abs(z):.3e} is below abs_tol")
    theta = float(np.mod(-np.angle(z), np.pi))
    # np.mod can return pi itself for inputs a hair below a multiple of pi
    return 0.0 if theta >= np.pi else theta


def phase_distance(a, b):
    """Distance between two angles taken modulo pi."""
    d = float(np.mod(a - b, np.pi))
    return min(d, np.pi - d)
