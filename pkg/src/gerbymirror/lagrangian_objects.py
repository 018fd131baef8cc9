"""Graph Lagrangians in the mirror torus and the Fukaya-object test.

The graph of x -> s(x) + tau x carries the flat local system
d - 2 pi i q^t dx; it is an object when both the symplectic form and the
B-field of the (twisted) mirror restrict to zero on it.
"""

from dataclasses import dataclass

import numpy as np

from .bundle_objects import (
    BundleObject,
    GridVerdict,
    SectionData,
    _verdict,
    eval_section,
    is_holomorphic,
    jacobian,
    jacobians,
    sample_grid,
)
from .errors import ShapeError
from .matrix_kernel import DEFAULT_TOL
from .torus_gcs import ComplexTorus, g_tau, mirror_forms


@dataclass(frozen=True, eq=False)
class GraphLagrangian:
    torus: ComplexTorus
    section: SectionData
    tau: np.ndarray = None

    def __post_init__(self):
        n = self.torus.n
        if self.section.n != n:
            raise ShapeError("section and torus dimensions differ")
        tau = np.zeros((n, n), dtype=np.int64) if self.tau is None else np.asarray(self.tau)
        if tau.shape != (n, n) or not np.array_equal(tau, np.round(tau)):
            raise ShapeError("tau must be an integer n x n matrix")
        tau = np.round(tau).astype(np.int64)
        tau.setflags(write=False)
        object.__setattr__(self, "tau", tau)

    @property
    def n(self):
        return self.torus.n


def mirror_mats(torus):
    """(omega_mat, B_mat) of the mirror: Im and Re of -(T^{-1})^t, no 2 pi."""
    P = -np.linalg.inv(torus.T).T
    return P.imag, P.real


def graph_point(lag, x):
    x = np.asarray(x, dtype=float)
    return np.concatenate([x, eval_section(lag.section, x) + lag.tau @ x])


def tangent_frame(lag, x, backend=None):
    """Columns e_j + (ds/dx + tau)_col_j spanning the graph's tangent space."""
    A = jacobian(lag.section, x, backend)
    return np.vstack([np.eye(lag.n), A + lag.tau])


def omega_restriction(lag, x, backend=None):
    """omega_tau(xi_j, xi_k), from the closed form 2 pi (W A - (W A)^t)."""
    W, _ = mirror_mats(lag.torus)
    WA = W @ jacobian(lag.section, x, backend)
    return 2.0 * np.pi * (WA - WA.T)


def b_restriction(lag, x, backend=None):
    _, B = mirror_mats(lag.torus)
    BA = B @ jacobian(lag.section, x, backend)
    return 2.0 * np.pi * (BA - BA.T)


def twisted_mirror_forms(lag):
    """Full 2n x 2n matrices of omega_tau and B_tau in (dx, dy), with 2 pi."""
    F = mirror_forms(lag.torus, lag.tau)
    return F.real, -F.imag


def omega_restriction_congruence(lag, x, backend=None):
    """F^t Omega_tau F for the tangent frame F."""
    F = tangent_frame(lag, x, backend)
    return F.T @ twisted_mirror_forms(lag)[0] @ F


def b_restriction_congruence(lag, x, backend=None):
    F = tangent_frame(lag, x, backend)
    return F.T @ twisted_mirror_forms(lag)[1] @ F


def is_fukaya_object(lag, grid=None, tol=DEFAULT_TOL, backend=None):
    """Do omega_tau and B_tau both vanish on the graph at every grid point?

    Evaluated through the full twisted forms and the tangent frame, not
    through the symmetry shortcut, so it is independent of is_holomorphic.
    """
    pts = sample_grid(lag.n, lag.section) if grid is None else np.asarray(grid, dtype=float)
    Om, Bm = twisted_mirror_forms(lag)
    Js = jacobians(lag.section, pts, backend)
    n = lag.n
    frames = np.concatenate([np.broadcast_to(np.eye(n), Js.shape), Js + lag.tau], axis=1)
    Ft = frames.transpose(0, 2, 1)
    vals = np.maximum(
        np.max(np.abs(Ft @ Om @ frames), axis=(1, 2)),
        np.max(np.abs(Ft @ Bm @ frames), axis=(1, 2)),
    )
    W, B = mirror_mats(lag.torus)
    scale = max(1.0, 2 * np.pi * max(np.max(np.abs(W)), np.max(np.abs(B))) * float(np.max(np.abs(Js))))
    return _verdict(vals, pts, tol.abs_tol * scale)


def apply_symplectomorphism(lag, tau):
    """Image of an untwisted object under phi_{g_tau}; q is carried unchanged."""
    if np.any(lag.tau):
        raise ValueError("apply_symplectomorphism expects an untwisted object")
    return GraphLagrangian(lag.torus, lag.section, tau)


def phi_g_tau(tau, point):
    return g_tau(tau) @ np.asarray(point, dtype=float)


@dataclass
class Correspondence:
    holomorphic: GridVerdict
    fukaya: GridVerdict

    @property
    def agree(self):
        return self.holomorphic.holds == self.fukaya.holds

    @property
    def verdict(self):
        return self.holomorphic.holds


def mirror_correspondence_check(section, torus, tau=None, grid=None, tol=DEFAULT_TOL, backend=None):
    """Run the bundle-side and Lagrangian-side tests on the same data."""
    hol = is_holomorphic(BundleObject(torus, section, tau), grid, tol, backend)
    fuk = is_fukaya_object(GraphLagrangian(torus, section, tau), grid, tol, backend)
    return Correspondence(hol, fuk)
