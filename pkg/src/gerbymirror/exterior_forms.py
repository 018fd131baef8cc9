"""Brute-force exterior algebra on a real vector space of dimension <= 8.

Forms are stored as ``{sorted index tuple: complex coefficient}``; products
go through the bitmask kernel in :mod:`gerbymirror.kernels`.  For tori the
basis order is (dx_1..dx_n, dy_1..dy_n).
"""

import itertools
import math

import numpy as np

from . import kernels
from .errors import NotAntisymmetric, ShapeError
from .matrix_kernel import DEFAULT_TOL, is_antisymmetric

MAX_DIM = 8


def _mask(idx):
    m = 0
    for i in idx:
        m |= 1 << i
    return m


def _indices(mask):
    return tuple(i for i in range(mask.bit_length()) if mask >> i & 1)


class ExteriorForm:
    """A homogeneous k-form with complex coefficients."""

    __slots__ = ("dim", "degree", "coeffs")

    def __init__(self, dim, degree, coeffs=None):
        if not 0 <= dim <= MAX_DIM:
            raise ShapeError(f"dimension must be in 0..{MAX_DIM}, got {dim}")
        if degree < 0:
            raise ShapeError(f"negative degree {degree}")
        self.dim = dim
        self.degree = degree
        self.coeffs = {}
        for idx, c in (coeffs or {}).items():
            idx = tuple(idx)
            if len(idx) != degree or any(not 0 <= i < dim for i in idx):
                raise ShapeError(f"bad index tuple {idx} for a {degree}-form in dimension {dim}")
            if len(set(idx)) < len(idx):
                continue
            order = sorted(range(len(idx)), key=idx.__getitem__)
            key = tuple(idx[i] for i in order)
            self.coeffs[key] = self.coeffs.get(key, 0) + permutation_sign(order) * complex(c)
        self.coeffs = {k: v for k, v in self.coeffs.items() if v != 0}

    @classmethod
    def scalar(cls, dim, value=1.0):
        return cls(dim, 0, {(): value})

    @classmethod
    def basis(cls, dim, *idx):
        return cls(dim, len(idx), {idx: 1.0})

    @classmethod
    def from_dense(cls, dense, degree):
        dim = len(dense).bit_length() - 1
        out = cls(dim, degree)
        for mask in np.flatnonzero(dense):
            idx = _indices(int(mask))
            if len(idx) != degree:
                raise ShapeError("dense array mixes degrees")
            out.coeffs[idx] = complex(dense[mask])
        return out

    def to_dense(self):
        dense = np.zeros(1 << self.dim, dtype=np.complex128)
        for idx, c in self.coeffs.items():
            dense[_mask(idx)] = c
        return dense

    def __getitem__(self, idx):
        return self.coeffs.get(tuple(idx), 0j)

    def __add__(self, other):
        self._same_space(other)
        if other.degree != self.degree:
            raise ShapeError("cannot add forms of different degree")
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return ExteriorForm(self.dim, self.degree, out)

    def __neg__(self):
        return ExteriorForm(self.dim, self.degree, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        return ExteriorForm(self.dim, self.degree, {k: scalar * v for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __xor__(self, other):
        return wedge(self, other)

    def allclose(self, other, atol=1e-12):
        self._same_space(other)
        keys = set(self.coeffs) | set(other.coeffs)
        return all(abs(self[k] - other[k]) <= atol for k in keys)

    def _same_space(self, other):
        if self.dim != other.dim:
            raise ShapeError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __repr__(self):
        terms = " + ".join(f"({v:.6g}) e{list(k)}" for k, v in sorted(self.coeffs.items()))
        return f"ExteriorForm(dim={self.dim}, degree={self.degree}: {terms or '0'})"


def permutation_sign(perm):
    """Sign of a permutation of range(len(perm)), by counting cycles."""
    perm = list(perm)
    seen = [False] * len(perm)
    sign = 1
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        i = start
        while not seen[i]:
            seen[i] = True
            i = perm[i]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def interleaving_sign(n):
    """e_sorted = sign * (dx1 ^ dy1 ^ ... ^ dxn ^ dyn)."""
    order = [k for i in range(n) for k in (i, n + i)]
    return permutation_sign(order)


def wedge(f, g, backend=None):
    f._same_space(g)
    if f.degree + g.degree > f.dim:
        return ExteriorForm(f.dim, f.degree + g.degree)
    dense = kernels.wedge_dense(f.to_dense(), g.to_dense(), backend=backend)
    return ExteriorForm.from_dense(dense, f.degree + g.degree)


def two_form_from_matrix(W, tol=DEFAULT_TOL):
    """sum_{i<j} W[i, j] e^i ^ e^j."""
    W = np.asarray(W)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise ShapeError(f"expected a square matrix, got {W.shape}")
    if not is_antisymmetric(W, tol):
        raise NotAntisymmetric("two-form coefficient matrix must be antisymmetric")
    d = W.shape[0]
    return ExteriorForm(d, 2, {(i, j): W[i, j] for i in range(d) for j in range(i + 1, d)})


def matrix_from_two_form(f):
    if f.degree != 2:
        raise ShapeError("not a two-form")
    W = np.zeros((f.dim, f.dim), dtype=complex)
    for (i, j), c in f.coeffs.items():
        W[i, j] = c
        W[j, i] = -c
    return W


def top_coefficient(f):
    """Coefficient against dx1 ^ dy1 ^ ... ^ dxn ^ dyn (the interleaved volume)."""
    if f.dim % 2 or f.degree != f.dim:
        raise ShapeError("top_coefficient needs a top-degree form on an even-dimensional space")
    return complex(f[tuple(range(f.dim))]) * interleaving_sign(f.dim // 2)


def power(f, k, backend=None):
    """k-fold wedge power; k = 0 gives the constant 1."""
    if k < 0:
        raise ValueError("power must be non-negative")
    out = ExteriorForm.scalar(f.dim)
    for _ in range(k):
        out = wedge(out, f, backend=backend)
    return out


def pullback(f, M):
    """Pull ``f`` back along the linear map v -> M v.

    ``f`` lives on the target (dimension ``M.shape[0]``); the result lives on
    the source.  Each coefficient is a sum of k x k minors of M.
    """
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != f.dim:
        raise ShapeError(f"map of shape {M.shape} cannot pull back a form of dimension {f.dim}")
    src = M.shape[1]
    k = f.degree
    if k > src:
        return ExteriorForm(src, k)
    out = {}
    for J in itertools.combinations(range(src), k):
        total = 0j
        for I, c in f.coeffs.items():
            total += c * (np.linalg.det(M[np.ix_(I, J)]) if k else 1.0)
        if total != 0:
            out[J] = total
    return ExteriorForm(src, k, out)


def top_power_coefficient(W, backend=None):
    """top_coefficient(power(two_form_from_matrix(W), n)) for a 2n x 2n W."""
    d = np.asarray(W).shape[0]
    return top_coefficient(power(two_form_from_matrix(W), d // 2, backend=backend))


def pfaffian_identity_value(W, pf):
    """n! * Pf(W) * interleaving sign: what the top power must equal."""
    n = np.asarray(W).shape[0] // 2
    return math.factorial(n) * pf * interleaving_sign(n)
