"""Kahler data, dHYM phases of bundles and special-Lagrangian phases of graphs.

Phases live in [0, pi): theta is the angle making exp(i theta) z real.  A
phase "exists" for an object when it is constant over the sample grid.
"""

from dataclasses import dataclass
from math import factorial

import numpy as np

from . import exterior_forms as ef
from .bundle_objects import BundleObject, curvature, is_holomorphic, jacobian, jacobians, sample_grid
from .errors import MirrorUndefined, NotHolomorphic, NotLagrangian
from .lagrangian_objects import GraphLagrangian, is_fukaya_object
from .matrix_kernel import DEFAULT_TOL, phase_distance, phase_mod_pi
from .torus_gcs import gcs_from_complex

# ---------------------------------------------------------------------------
# Kahler data
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class KahlerData:
    """Coefficient matrices in (dx, dy) of omega and g, and the block J."""

    omega_coeff: np.ndarray
    g_coeff: np.ndarray
    J_coeff: np.ndarray

    @classmethod
    def from_torus(cls, torus):
        X, Y = torus.X, torus.Y
        n = torus.n
        I, Z = np.eye(n), np.zeros((n, n))
        omega = 2 * np.pi * np.block([[Z, Y], [-Y.T, X.T @ Y - Y.T @ X]])
        g = 2 * np.pi * np.block([[I, X], [X.T, X.T @ X + Y.T @ Y]])
        J = gcs_from_complex(torus).M[: 2 * n, : 2 * n]
        return cls(omega, g, J)


@dataclass
class KahlerReport:
    omega_factor_error: float
    omega_det: float
    g_factor_error: float
    g_min_eigenvalue: float
    j_square_error: float
    compatibility_error: float
    tol: float

    @property
    def passed(self):
        return (
            max(self.omega_factor_error, self.g_factor_error, self.j_square_error, self.compatibility_error) <= self.tol
            and self.omega_det != 0.0
            and self.g_min_eigenvalue > 0.0
        )

    @property
    def max_error(self):
        return max(self.omega_factor_error, self.g_factor_error, self.j_square_error, self.compatibility_error)


def kahler_verify(torus, tol=1e-12, J=None):
    """Checks the LDU forms of omega and g, J^2 = -1, J^t G = Omega.

    ``J`` overrides the complex structure block (used for negative controls).
    """
    data = KahlerData.from_torus(torus)
    X, Y = torus.X, torus.Y
    n = torus.n
    I, Z = np.eye(n), np.zeros((n, n))
    lower = np.block([[I, Z], [X.T, I]])
    upper = np.block([[I, X], [Z, I]])
    omega_ldu = 2 * np.pi * lower @ np.block([[Z, Y], [-Y.T, Z]]) @ upper
    g_ldu = 2 * np.pi * lower @ np.block([[I, Z], [Z, Y.T @ Y]]) @ upper
    J = data.J_coeff if J is None else np.asarray(J, dtype=float)
    scale = max(1.0, float(np.max(np.abs(data.g_coeff))))
    return KahlerReport(
        omega_factor_error=float(np.max(np.abs(omega_ldu - data.omega_coeff))),
        # det of the middle factor; the unipotent factors have det 1
        omega_det=float(np.linalg.det(Y) ** 2),
        g_factor_error=float(np.max(np.abs(g_ldu - data.g_coeff))),
        # the middle factor diag(I, Y^t Y) is PD iff Y is invertible
        g_min_eigenvalue=float(np.linalg.eigvalsh(Y.T @ Y)[0]),
        j_square_error=float(np.max(np.abs(J @ J + np.eye(2 * n)))),
        compatibility_error=float(np.max(np.abs(J.T @ data.g_coeff - data.omega_coeff))),
        tol=tol * scale,
    )


# ---------------------------------------------------------------------------
# dHYM
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TwoRoutes:
    closed: complex
    direct: complex

    @property
    def value(self):
        return self.closed

    @property
    def rel_error(self):
        return abs(self.closed - self.direct) / max(abs(self.closed), abs(self.direct), 1e-300)


def dhym_closed(torus, A):
    n = torus.n
    return (2j * np.pi) ** n * factorial(n) * np.linalg.det(-1j * torus.Y + np.asarray(A).T)


def curvature_from_jacobian(A):
    """Curvature matrix in (dx, dy) for ds/dx = A: entry (dx_i, dy_j) = -2 pi i A_ji."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    up = -2j * np.pi * A.T
    Z = np.zeros((n, n), dtype=complex)
    return np.block([[Z, up], [-up.T, Z]])


def dhym_top_from_jacobian(torus, A, backend=None):
    omega = KahlerData.from_torus(torus).omega_coeff
    direct = ef.top_power_coefficient(omega - curvature_from_jacobian(A), backend=backend)
    return TwoRoutes(complex(dhym_closed(torus, A)), direct)


def dhym_top(obj, x, backend=None):
    """Top coefficient of (omega - F)^n by wedge powers and by closed form."""
    omega = KahlerData.from_torus(obj.torus).omega_coeff
    F = curvature(obj, x, backend)
    direct = ef.top_power_coefficient(omega - F, backend=backend)
    return TwoRoutes(complex(dhym_closed(obj.torus, jacobian(obj.section, x, backend))), direct)


@dataclass
class PhaseResult:
    exists: bool
    theta: float
    max_phase_spread: float
    samples: int

    def __post_init__(self):
        if not self.exists:
            self.theta = float("nan")


def _phase_result(values, tol):
    thetas = np.array([phase_mod_pi(v, tol) for v in values])
    ref = thetas[0]
    spread = max(phase_distance(t, ref) for t in thetas)
    return PhaseResult(bool(spread <= tol.phase_tol), float(ref), float(spread), len(thetas)), thetas


def dhym_values(obj, pts, backend=None):
    Js = jacobians(obj.section, pts, backend)
    n = obj.n
    return (2j * np.pi) ** n * factorial(n) * np.linalg.det(-1j * obj.torus.Y + Js.transpose(0, 2, 1))


def dhym_phase(obj, grid=None, tol=DEFAULT_TOL, backend=None, return_thetas=False):
    pts = sample_grid(obj.n, obj.section) if grid is None else np.asarray(grid, dtype=float)
    hol = is_holomorphic(obj, pts, tol, backend)
    if not hol:
        raise NotHolomorphic(f"curvature has a (0,2)-part (asymmetry {hol.max_violation:.3e})")
    res, thetas = _phase_result(dhym_values(obj, pts, backend), tol)
    return (res, thetas) if return_thetas else res


# ---------------------------------------------------------------------------
# special Lagrangian
# ---------------------------------------------------------------------------


def mirror_period(torus, tau, tol=DEFAULT_TOL):
    """(-tau - i Y^t); raises MirrorUndefined when it is singular."""
    M = -np.asarray(tau, dtype=float) - 1j * torus.Y.T
    d = np.linalg.det(M)
    if abs(d) <= tol.abs_tol:
        raise MirrorUndefined(f"det(-tau - i Y^t) = {d:.3e} vanishes")
    return M


def slag_value_from_jacobian(torus, tau, A, tol=DEFAULT_TOL):
    M = mirror_period(torus, tau, tol)
    A = np.asarray(A, dtype=float)
    closed = np.linalg.det(-1j * torus.Y.T + A) / np.linalg.det(M)
    direct = np.linalg.det(np.eye(torus.n) + np.linalg.solve(M, A + np.asarray(tau, dtype=float)))
    return TwoRoutes(complex(closed), complex(direct))


def slag_value(lag, x, tol=DEFAULT_TOL, backend=None):
    """Holomorphic volume form on the tangent frame, two ways."""
    return slag_value_from_jacobian(lag.torus, lag.tau, jacobian(lag.section, x, backend), tol)


def slag_values(lag, pts, tol=DEFAULT_TOL, backend=None):
    M = mirror_period(lag.torus, lag.tau, tol)
    Js = jacobians(lag.section, pts, backend)
    return np.linalg.det(-1j * lag.torus.Y.T + Js) / np.linalg.det(M)


def slag_phase(lag, grid=None, tol=DEFAULT_TOL, backend=None, return_thetas=False):
    pts = sample_grid(lag.n, lag.section) if grid is None else np.asarray(grid, dtype=float)
    fuk = is_fukaya_object(lag, pts, tol, backend)
    if not fuk:
        raise NotLagrangian(f"the mirror forms do not vanish on the graph ({fuk.max_violation:.3e})")
    res, thetas = _phase_result(slag_values(lag, pts, tol, backend), tol)
    return (res, thetas) if return_thetas else res


# ---------------------------------------------------------------------------
# Equivalence of the two phase conditions
# ---------------------------------------------------------------------------


def expected_offset(torus, tau, tol=DEFAULT_TOL):
    """arg((2 pi i)^n) - arg(det(-tau - i Y^t)^{-1}) mod pi."""
    M = mirror_period(torus, tau, tol)
    return float(np.mod(np.angle((2j * np.pi) ** torus.n) - np.angle(1.0 / np.linalg.det(M)), np.pi))


@dataclass
class EquivalenceReport:
    dhym: PhaseResult = None
    slag: PhaseResult = None
    reason: str = ""
    delta: float = float("nan")
    expected_delta: float = float("nan")
    delta_error: float = 0.0
    delta_spread: float = 0.0

    @property
    def agree(self):
        if self.dhym is None or self.slag is None:
            return self.dhym is None and self.slag is None
        return self.dhym.exists == self.slag.exists

    @property
    def delta_is_zero(self):
        return self.dhym is not None and phase_distance(self.delta, 0.0) <= 1e-9


def equivalence_check(section, torus, tau=None, grid=None, tol=DEFAULT_TOL, backend=None):
    """Existence of a dHYM phase vs existence of a special-Lagrangian phase.

    Also measures delta = theta_sLag - theta_dHYM (mod pi) pointwise; it must
    be the x-independent constant ``expected_offset``.  A non-holomorphic
    object fails both preconditions and is reported with a reason.
    MirrorUndefined propagates to the caller.
    """
    obj = BundleObject(torus, section, tau)
    lag = GraphLagrangian(torus, section, obj.tau)
    pts = sample_grid(obj.n, section) if grid is None else np.asarray(grid, dtype=float)
    expected = expected_offset(torus, obj.tau, tol)
    report = EquivalenceReport(expected_delta=expected)
    reasons = []
    d_thetas = s_thetas = None
    try:
        report.dhym, d_thetas = dhym_phase(obj, pts, tol, backend, return_thetas=True)
    except NotHolomorphic as exc:
        reasons.append(f"dHYM: {exc}")
    try:
        report.slag, s_thetas = slag_phase(lag, pts, tol, backend, return_thetas=True)
    except NotLagrangian as exc:
        reasons.append(f"sLag: {exc}")
    report.reason = "; ".join(reasons)
    if d_thetas is not None and s_thetas is not None:
        deltas = np.mod(s_thetas - d_thetas, np.pi)
        report.delta = float(deltas[0])
        report.delta_spread = max(phase_distance(d, deltas[0]) for d in deltas)
        report.delta_error = max(phase_distance(d, expected) for d in deltas)
    return report
