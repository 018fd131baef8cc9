"""Line bundles on the torus built from quasi-periodic sections.

A section s: R^n -> R^n with s(x + e_j) = s(x) + a_j defines a line bundle
with transition functions exp(2 pi i a_j^t y) and the connection

    d - 2 pi i (s(x) + T^t q + tau x)^t dy,

twisted by the flat gerbe when tau != 0.  Sections are integer-affine plus a
finite real Fourier series, which keeps the quasi-periodicity exact.
"""

from dataclasses import dataclass, field

import numpy as np

from . import gerbe, kernels
from .errors import ShapeError
from .matrix_kernel import DEFAULT_TOL
from .torus_gcs import ComplexTorus

MAX_MODE_ORDER = 4
GRID_STEPS = 9


def _canonical(k):
    for v in k:
        if v:
            return v > 0
    return False


@dataclass(frozen=True, eq=False)
class SectionData:
    """s(x) = a x + c + sum_k (u_k cos(2 pi k.x) + v_k sin(2 pi k.x)).

    ``modes`` is a sequence of ``(k, u_k, v_k)`` with integer k in the half
    space where the first nonzero entry is positive, |k_i| <= 4 and no key
    repeated.  ``q`` is the holonomy of the flat unitary local system.
    """

    a: np.ndarray
    c: np.ndarray = None
    modes: tuple = ()
    q: np.ndarray = None

    def __post_init__(self):
        a = np.asarray(self.a)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ShapeError(f"winding matrix must be square, got {a.shape}")
        if not np.array_equal(a, np.round(a)):
            raise ShapeError("winding matrix must be integral")
        n = a.shape[0]
        a = np.round(a).astype(np.int64)
        c = np.zeros(n) if self.c is None else np.asarray(self.c, dtype=float).reshape(-1)
        q = np.zeros(n) if self.q is None else np.asarray(self.q, dtype=float).reshape(-1)
        if c.shape != (n,) or q.shape != (n,):
            raise ShapeError("c and q must be n-vectors")
        seen = set()
        modes = []
        for k, u, v in self.modes:
            k = tuple(int(x) for x in k)
            if len(k) != n:
                raise ShapeError(f"mode key {k} has the wrong length")
            if not _canonical(k):
                raise ShapeError(f"mode key {k} is not in the canonical half space")
            if max(abs(x) for x in k) > MAX_MODE_ORDER:
                raise ShapeError(f"mode key {k} exceeds order {MAX_MODE_ORDER}")
            if k in seen:
                raise ShapeError(f"duplicate mode key {k}")
            seen.add(k)
            u = np.asarray(u, dtype=float).reshape(-1)
            v = np.asarray(v, dtype=float).reshape(-1)
            if u.shape != (n,) or v.shape != (n,):
                raise ShapeError("mode amplitudes must be n-vectors")
            modes.append((k, u, v))
        for name, val in (("a", a), ("c", c), ("q", q)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)
        object.__setattr__(self, "modes", tuple(modes))

    @property
    def n(self):
        return self.a.shape[0]

    @property
    def is_affine(self):
        return not self.modes

    def mode_arrays(self):
        """(ks, us, vs) stacked as (K, n) float arrays."""
        n = self.n
        if not self.modes:
            z = np.zeros((0, n))
            return z, z, z
        ks = np.array([m[0] for m in self.modes], dtype=float)
        us = np.array([m[1] for m in self.modes])
        vs = np.array([m[2] for m in self.modes])
        return ks, us, vs


@dataclass(frozen=True, eq=False)
class BundleObject:
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


def eval_section(s, x):
    x = np.asarray(x, dtype=float)
    out = s.a @ x + s.c
    for k, u, v in s.modes:
        phase = 2.0 * np.pi * np.dot(k, x)
        out = out + u * np.cos(phase) + v * np.sin(phase)
    return out


def jacobian(s, x, backend=None):
    """ds/dx at x, differentiated term by term."""
    return jacobians(s, np.asarray(x, dtype=float)[None, :], backend)[0]


def jacobians(s, pts, backend=None):
    """ds/dx at every row of ``pts`` -> (P, n, n)."""
    ks, us, vs = s.mode_arrays()
    return kernels.section_jacobians(s.a, ks, us, vs, pts, backend=backend)


def transition_factor(j, a, y):
    """exp(2 pi i a_j^t y) for the crossing of axis j (0-based)."""
    a = np.asarray(a)
    if not 0 <= j < a.shape[1]:
        raise IndexError(f"axis {j} out of range for n = {a.shape[1]}")
    return complex(np.exp(2j * np.pi * np.dot(a[:, j], y)))


def chart_transition(a, shift, y):
    """phi_ij(y) between charts whose x-lifts differ by the integer ``shift``."""
    out = 1.0 + 0j
    for j, k in enumerate(shift):
        out *= transition_factor(j, a, y) ** (-int(k))
    return out


def connection_form(obj, x, include_twist=True):
    """dy-coefficients of the connection 1-form: -2 pi i (s + T^t q + tau x)."""
    x = np.asarray(x, dtype=float)
    s = obj.section
    coeff = eval_section(s, x) + obj.torus.T.T @ s.q
    if include_twist:
        coeff = coeff + obj.tau @ x
    return -2j * np.pi * coeff


@dataclass
class TransitionReport:
    pairs_checked: int
    max_error: float
    worst_pair: tuple = None
    tol: float = DEFAULT_TOL.abs_tol

    @property
    def passed(self):
        return self.max_error <= self.tol


def verify_transition_compat(obj, epsilon=gerbe.DEFAULT_EPSILON, tol=DEFAULT_TOL, include_twist=True):
    """A_j - A_i - phi_ij^{-1} d phi_ij = -i omega_ij on gerbe cover overlaps.

    The connection and transition data do not depend on the fibre labels m,
    so pairs are taken with m = m' and every combination of x-labels; this
    includes every x_j-wraparound overlap.  ``include_twist=False`` drops the
    tau x term from the connection (negative control).
    """
    n = obj.n
    eps = gerbe.check_epsilon(epsilon)
    a = obj.section.a
    cover = gerbe.cover_indices(n)
    worst, worst_pair, pairs = 0.0, None, 0
    scale = 1.0
    for i in cover:
        for j in cover:
            if i.m != j.m:
                continue
            ov = gerbe.overlap(i, j, eps)
            if ov is None:
                continue
            pairs += 1
            mid = ov.midpoint()
            xi = np.array([float(gerbe.lift(v, p, eps)) for v, p in zip(i.l, mid[:n])])
            xj = np.array([float(gerbe.lift(v, p, eps)) for v, p in zip(j.l, mid[:n])])
            shift = gerbe.lift_shift(i, j, eps)
            # phi = exp(-2 pi i (a shift)^t y), so phi^{-1} d phi has constant dy-coefficients
            dlog_phi = -2j * np.pi * (a @ shift)
            lhs = connection_form(obj, xj, include_twist) - connection_form(obj, xi, include_twist) - dlog_phi
            rhs = -1j * gerbe.transition_form(i, j, obj.tau, eps)
            err = float(np.max(np.abs(lhs - rhs)))
            scale = max(scale, float(np.max(np.abs(rhs))))
            if err > worst:
                worst, worst_pair = err, (str(i), str(j))
    return TransitionReport(pairs, worst, worst_pair, tol.abs_tol * scale)


def curvature(obj, x, backend=None):
    """Curvature 2-form in (dx, dy) with the 1-connection subtracted.

    Entry (dx_i, dy_j) is -2 pi i A_ji for A = ds/dx; the matrix is
    antisymmetric and independent of tau.
    """
    A = jacobian(obj.section, x, backend)
    n = obj.n
    up = -2j * np.pi * A.T
    Z = np.zeros((n, n), dtype=complex)
    return np.block([[Z, up], [-up.T, Z]])


def _imag_gap_inv(T):
    return np.linalg.inv(T - T.conj())


def zero_two_part_from_jacobian(T, A):
    G = _imag_gap_inv(T)
    M = 2j * np.pi * G.T @ (A @ T).T @ G
    return M - M.T


def zero_two_part(obj, x, backend=None):
    """dzbar ^ dzbar coefficient matrix of the curvature."""
    return zero_two_part_from_jacobian(obj.torus.T, jacobian(obj.section, x, backend))


def complex_coframe(T):
    """P with (dx, dy) = P (dz, dzbar) for z = x + T y."""
    T = np.asarray(T, dtype=complex)
    n = T.shape[0]
    G = _imag_gap_inv(T)
    I = np.eye(n)
    dy = np.hstack([G, -G])
    dx = np.hstack([I, np.zeros((n, n))]) - T @ dy
    return np.vstack([dx, dy])


def zero_two_part_by_basis_change(obj, x, backend=None):
    """Same quantity as :func:`zero_two_part`, read off P^t Omega P."""
    n = obj.n
    P = complex_coframe(obj.torus.T)
    W = curvature(obj, x, backend)
    return (P.T @ W @ P)[n:, n:]


def sample_grid(n, section=None, steps=GRID_STEPS):
    """steps^n lattice points plus extremal points of every Fourier mode."""
    axes = np.arange(steps) / steps
    grid = np.stack(np.meshgrid(*([axes] * n), indexing="ij"), axis=-1).reshape(-1, n)
    extra = []
    if section is not None:
        for k, _, _ in section.modes:
            kv = np.asarray(k, dtype=float)
            for t in (0.0, 0.25, 0.5, 0.75):
                extra.append((t / kv.dot(kv)) * kv)
    if extra:
        grid = np.vstack([grid, np.array(extra)])
    return grid


@dataclass
class GridVerdict:
    """Outcome of a pointwise condition checked over a sample grid."""

    holds: bool
    max_violation: float
    witness: np.ndarray = field(default=None, repr=False)
    points_checked: int = 0

    def __bool__(self):
        return self.holds


def _verdict(values, pts, tol):
    idx = int(np.argmax(values)) if len(values) else 0
    worst = float(values[idx]) if len(values) else 0.0
    return GridVerdict(bool(worst <= tol), worst, pts[idx].copy() if len(values) else None, len(values))


def is_holomorphic(obj, grid=None, tol=DEFAULT_TOL, backend=None):
    """Is (ds/dx) T symmetric at every grid point?"""
    pts = sample_grid(obj.n, obj.section) if grid is None else np.asarray(grid, dtype=float)
    AT = jacobians(obj.section, pts, backend) @ obj.torus.T
    asym = np.max(np.abs(AT - AT.transpose(0, 2, 1)), axis=(1, 2))
    scale = max(1.0, float(np.max(np.abs(AT))))
    return _verdict(asym, pts, tol.abs_tol * scale)


def zero_two_part_vanishes(obj, grid=None, tol=DEFAULT_TOL, backend=None):
    pts = sample_grid(obj.n, obj.section) if grid is None else np.asarray(grid, dtype=float)
    T = obj.torus.T
    Js = jacobians(obj.section, pts, backend)
    vals = np.array([np.max(np.abs(zero_two_part_from_jacobian(T, A))) for A in Js])
    G = _imag_gap_inv(T)
    scale = max(1.0, 2 * np.pi * float(np.max(np.abs(G))) ** 2 * float(np.max(np.abs(Js @ T))))
    return _verdict(vals, pts, tol.abs_tol * scale)
