"""Complex tori and constant-coefficient generalized complex structures.

Matrices act on T + T^* of the real 2n-torus in the ordered basis
(d/dx, d/dy, dx, dy), each block of size n.  Column convention: column i
holds the coefficients of the image of basis vector i, so a matrix written
as ``basis_row @ M`` can be used as-is.

Two-forms are encoded project-wide by their antisymmetric coefficient matrix
``W`` with ``form = sum_{i<j} W[i, j] e^i ^ e^j``; equivalently
``form(u, v) = u @ W @ v``.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidTorus, NotComplexType, NotSymplecticType, ShapeError
from .matrix_kernel import DEFAULT_TOL, as_matrix, is_positive_definite, is_symmetric


class TrivialDeformationWarning(UserWarning):
    """tau T is symmetric, so the B-field transform leaves I_J unchanged."""


@dataclass(frozen=True, eq=False)
class ComplexTorus:
    """C^n / (Z^n + T Z^n) with complex coordinates z = x + T y.

    ``Y`` need not be symmetric; positivity means ``v @ Y @ v > 0`` for real
    ``v != 0``, i.e. its symmetric part is positive definite.
    """

    X: np.ndarray
    Y: np.ndarray
    tol: object = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        X = as_matrix(self.X, float)
        Y = as_matrix(self.Y, float)
        if X.shape != Y.shape or X.shape[0] != X.shape[1]:
            raise InvalidTorus(f"Re T and Im T must be equal square shapes, got {X.shape}, {Y.shape}")
        if not is_positive_definite(0.5 * (Y + Y.T), self.tol):
            raise InvalidTorus("Im T is not positive definite")
        if abs(np.linalg.det(X + 1j * Y)) <= self.tol.abs_tol:
            raise InvalidTorus("det T vanishes; the mirror torus does not exist")
        X.setflags(write=False)
        Y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)

    @classmethod
    def from_period(cls, T, tol=DEFAULT_TOL):
        T = np.asarray(T, dtype=complex)
        return cls(T.real, T.imag, tol)

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def T(self):
        return self.X + 1j * self.Y


@dataclass(frozen=True, eq=False)
class GeneralizedComplexStructure:
    M: np.ndarray

    def __post_init__(self):
        M = as_matrix(self.M, float)
        if M.shape[0] != M.shape[1] or M.shape[0] % 4:
            raise ShapeError(f"GCS matrix must be 4n x 4n, got {M.shape}")
        M.setflags(write=False)
        object.__setattr__(self, "M", M)

    @property
    def n(self):
        return self.M.shape[0] // 4

    def square_error(self):
        """max entry of |M^2 + Id|."""
        return float(np.max(np.abs(self.M @ self.M + np.eye(4 * self.n))))

    def pairing_error(self):
        """max entry of |M^t Q M - Q|."""
        Q = pairing_matrix(self.n)
        return float(np.max(np.abs(self.M.T @ Q @ self.M - Q)))

    def is_valid(self, tol=DEFAULT_TOL):
        return self.square_error() <= tol.abs_tol and self.pairing_error() <= tol.abs_tol

    def blocks(self):
        """The 16 n x n blocks as a 4 x 4 nested list."""
        n = self.n
        return [[self.M[r * n:(r + 1) * n, c * n:(c + 1) * n] for c in range(4)] for r in range(4)]


@dataclass(frozen=True, eq=False)
class ComplexifiedSymplecticData:
    """Real symplectic form and B-field read off a B-transformed symplectic GCS.

    ``omega_form`` / ``b_form`` are 2n x 2n coefficient matrices in the basis
    (dx, dy) with the 2*pi factor removed.  ``omega_mat`` / ``b_mat`` are
    their dx-dy blocks, ``omega_xx`` / ``b_xx`` their dx-dx blocks.
    """

    omega_form: np.ndarray
    b_form: np.ndarray
    reconstruction_error: float = 0.0

    @property
    def n(self):
        return self.omega_form.shape[0] // 2

    @property
    def omega_mat(self):
        return self.omega_form[: self.n, self.n:]

    @property
    def b_mat(self):
        return self.b_form[: self.n, self.n:]

    @property
    def omega_xx(self):
        return self.omega_form[: self.n, : self.n]

    @property
    def b_xx(self):
        return self.b_form[: self.n, : self.n]

    def complexified(self):
        """Coefficient matrix of omega - i B (still without the 2*pi)."""
        return self.omega_form - 1j * self.b_form


def pairing_matrix(n):
    """Q with <u, v> = u^t Q v pairing d/dx_i with dx_i and d/dy_i with dy_i."""
    I = np.eye(2 * n)
    Z = np.zeros((2 * n, 2 * n))
    return np.block([[Z, I], [I, Z]])


def _blocks4(rows):
    return np.block(rows)


def gcs_from_complex(torus):
    """I_J, the generalized complex structure of the complex torus."""
    X, Y = torus.X, torus.Y
    Yi = np.linalg.inv(Y)
    YiT = Yi.T
    O = np.zeros_like(X)
    return GeneralizedComplexStructure(
        _blocks4(
            [
                [-X @ Yi, -Y - X @ Yi @ X, O, O],
                [Yi, Yi @ X, O, O],
                [O, O, YiT @ X.T, -YiT],
                [O, O, Y.T + X.T @ YiT @ X.T, -X.T @ YiT],
            ]
        )
    )


def gcs_from_kahler(torus):
    """I_omega for omega = 2 pi dx^t Y dy + 2 pi dy^t X^t Y dy."""
    X, Y = torus.X, torus.Y
    Yi = np.linalg.inv(Y)
    YiT = Yi.T
    O = np.zeros_like(X)
    return GeneralizedComplexStructure(
        _blocks4(
            [
                [O, O, YiT @ X.T - X @ Yi, -YiT],
                [O, O, Yi, O],
                [O, -Y, O, O],
                [Y.T, Y.T @ X - X.T @ Y, O, O],
            ]
        )
    )


def mirror_swap(n):
    """The permutation exchanging the d/dy block with the dy block."""
    I = np.eye(n)
    O = np.zeros((n, n))
    return _blocks4([[I, O, O, O], [O, O, O, I], [O, O, I, O], [O, I, O, O]])


def mirror(g):
    S = mirror_swap(g.n)
    return GeneralizedComplexStructure(S @ g.M @ S)


def b_shear(tau):
    """Left factor of the B-field transform by B = 2 pi dx^t tau^t dy."""
    tau = np.asarray(tau, dtype=float)
    n = tau.shape[0]
    I = np.eye(n)
    O = np.zeros((n, n))
    return _blocks4([[I, O, O, O], [O, I, O, O], [O, -tau.T, I, O], [tau, O, O, I]])


def b_transform(g, tau):
    tau = np.asarray(tau, dtype=float)
    if tau.shape != (g.n, g.n):
        raise ShapeError(f"tau must be {g.n} x {g.n}, got {tau.shape}")
    return GeneralizedComplexStructure(b_shear(tau) @ g.M @ b_shear(-tau))


def check_twist(torus, tau, tol=DEFAULT_TOL):
    """Warn when tau T is symmetric (the gerby deformation is then trivial).

    Returns True when the deformation is non-trivial.
    """
    tT = np.asarray(tau, dtype=float) @ torus.T
    if is_symmetric(tT, tol):
        warnings.warn(
            "tau T is symmetric: the B-field transform preserves I_J", TrivialDeformationWarning, stacklevel=2
        )
        return False
    return True


def symplectic_factor(omega_form):
    """[[0, -W^{-1}], [W^t ... ]]: the GCS of a symplectic coefficient matrix.

    Built so that the lower-left block is ``-omega_form`` (interior product
    in the column convention) and the upper-right block its negative inverse.
    """
    W = np.asarray(omega_form, dtype=float)
    m = W.shape[0]
    Z = np.zeros((m, m))
    lower = -W
    return np.block([[Z, -np.linalg.inv(lower)], [lower, Z]])


def b_factor(b_form):
    m = b_form.shape[0]
    return np.block([[np.eye(m), np.zeros((m, m))], [-np.asarray(b_form, dtype=float), np.eye(m)]])


def extract_complexified_symplectic(g, tol=DEFAULT_TOL):
    """Read (omega, B) from a GCS of the form e^B . J_omega . e^{-B}.

    The upper-right 2n block P carries -omega_block^{-1}; the B-field follows
    from the upper-left block.  The factorisation is rebuilt and compared, so
    anything that is not of this type raises :class:`NotSymplecticType`.
    """
    m = 2 * g.n
    TL = g.M[:m, :m]
    P = g.M[:m, m:]
    if abs(np.linalg.det(P)) <= tol.abs_tol:
        raise NotSymplecticType("upper-right block is singular")
    lower = -np.linalg.inv(P)
    beta = lower @ TL
    omega_form = -lower
    b_form = -beta
    rebuilt = b_factor(b_form) @ symplectic_factor(omega_form) @ b_factor(-b_form)
    err = float(np.max(np.abs(rebuilt - g.M)))
    asym = max(np.max(np.abs(omega_form + omega_form.T)), np.max(np.abs(b_form + b_form.T)))
    if err > tol.abs_tol or asym > tol.abs_tol:
        raise NotSymplecticType(
            f"not a B-transformed symplectic structure (reconstruction error {err:.3e}, asymmetry {asym:.3e})"
        )
    return ComplexifiedSymplecticData(omega_form, b_form, err)


def _complex_block(X, Y):
    Yi = np.linalg.inv(Y)
    return np.block([[-X @ Yi, -Y - X @ Yi @ X], [Yi, Yi @ X]])


def extract_period_matrix(g, tol=DEFAULT_TOL):
    """Period matrix of a (possibly beta-transformed) complex-type GCS.

    The upper-left 2n block must have the shape of I_J for some X' + iY';
    a beta-transform only adds a T^* -> T part, so the lower-left block has
    to vanish.
    """
    n = g.n
    m = 2 * n
    J = g.M[:m, :m]
    if np.max(np.abs(g.M[m:, :m])) > tol.abs_tol:
        raise NotComplexType("lower-left block is not zero")
    C = J[n:, :n]
    if abs(np.linalg.det(C)) <= tol.abs_tol:
        raise NotComplexType("d/dx -> d/dy block is singular")
    Yp = np.linalg.inv(C)
    Xp = Yp @ J[n:, n:]
    err = float(np.max(np.abs(_complex_block(Xp, Yp) - J)))
    err = max(err, float(np.max(np.abs(g.M[m:, m:] + J.T))))
    if err > tol.abs_tol:
        raise NotComplexType(f"upper-left block is not of complex type (error {err:.3e})")
    return Xp + 1j * Yp


def g_tau(tau):
    tau = np.asarray(tau, dtype=float)
    n = tau.shape[0]
    return np.block([[np.eye(n), np.zeros((n, n))], [tau, np.eye(n)]])


def mirror_forms(torus, tau=None):
    """2n x 2n complex coefficient matrices of the complexified mirror form.

    Returns the matrix of omega~^vee (tau=None or zero) or omega~_tau^vee, in
    the basis (dx-check, dy-check), including the 2*pi.
    """
    n = torus.n
    C = 2j * np.pi * np.linalg.inv(torus.T).T
    O = np.zeros((n, n), dtype=complex)
    xx = O.copy()
    if tau is not None:
        D = -C @ np.asarray(tau, dtype=float)
        xx = D - D.T
    return np.block([[xx, C], [-C.T, O]])


def symplectomorphism_residual(torus, tau, omega_tilde=None, omega_tilde_tau=None):
    """max |g_tau^t Omega~_tau g_tau - Omega~|."""
    O = mirror_forms(torus) if omega_tilde is None else omega_tilde
    Ot = mirror_forms(torus, tau) if omega_tilde_tau is None else omega_tilde_tau
    g = g_tau(tau)
    return float(np.max(np.abs(g.T @ Ot @ g - O)))


def symplectomorphism_check(torus, tau, tol=DEFAULT_TOL, omega_tilde=None, omega_tilde_tau=None):
    """Is phi_{g_tau} a complexified symplectomorphism onto the twisted mirror?"""
    res = symplectomorphism_residual(torus, tau, omega_tilde, omega_tilde_tau)
    scale = max(1.0, float(np.max(np.abs(mirror_forms(torus)))))
    return res <= tol.abs_tol * scale
