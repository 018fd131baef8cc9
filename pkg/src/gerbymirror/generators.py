"""Seeded random tori, twists and section objects for the verification suites.

Every draw goes through ``rng_for(seed, stream, counter)`` so each suite and
each sample has an independent, reproducible stream.
"""

import zlib

import numpy as np

from .bundle_objects import SectionData
from .torus_gcs import ComplexTorus


def stream_id(name):
    """Stable integer id for a named stream (crc32, not Python's salted hash)."""
    return zlib.crc32(name.encode("utf-8"))


def rng_for(seed, stream, counter=0):
    sid = stream_id(stream) if isinstance(stream, str) else int(stream)
    return np.random.default_rng([int(seed), sid, int(counter)])


def random_torus(rng, n, symmetric=False):
    """T = X + iY with Y's symmetric part >= I; Y is non-symmetric unless asked."""
    X = rng.normal(size=(n, n))
    M = rng.normal(size=(n, n))
    Y = M @ M.T / n + np.eye(n)
    if not symmetric:
        K = rng.normal(scale=0.5, size=(n, n))
        Y = Y + (K - K.T)
    return ComplexTorus(X, Y)


def random_tau(rng, n, bound=2):
    return rng.integers(-bound, bound + 1, size=(n, n))


def random_integer_symmetric(rng, n, bound=2):
    a = rng.integers(-bound, bound + 1, size=(n, n))
    return np.triu(a) + np.triu(a, 1).T


def _commuting_torus(rng, a, proportional):
    """A torus whose period matrix is a polynomial in the symmetric matrix a."""
    n = a.shape[0]
    I = np.eye(n)
    c1, c2 = rng.uniform(-0.3, 0.3, size=2)
    Y = I + c1 * a + c2 * (a @ a)
    # shift so Y is comfortably positive definite
    lo = np.linalg.eigvalsh(Y)[0]
    if lo < 0.5:
        Y = Y + (0.5 - lo + rng.uniform(0, 1)) * I
    alpha = rng.uniform(-1, 1)
    if proportional:
        X = alpha * Y
    else:
        beta, gamma = rng.uniform(-1, 1, size=2)
        X = alpha * Y + beta * a + gamma * I
    return ComplexTorus(X, Y)


def _canonical_key(rng, n, order=2):
    while True:
        k = rng.integers(-order, order + 1, size=n)
        nz = np.flatnonzero(k)
        if nz.size:
            return tuple(int(v) for v in (k if k[nz[0]] > 0 else -k))


def _modes(rng, n, count, direction=None):
    keys, out = set(), []
    while len(out) < count:
        k = _canonical_key(rng, n)
        if k in keys:
            continue
        keys.add(k)
        if direction is None:
            u, v = rng.normal(scale=0.1, size=(2, n))
        else:
            d = direction(np.asarray(k, dtype=float))
            d = d / np.linalg.norm(d)
            u, v = rng.normal(scale=0.1, size=2)[:, None] * d
        out.append((k, u, v))
    return tuple(out)


def holomorphic_object(rng, n, fourier=False):
    """(torus, section) with (ds/dx) T symmetric everywhere by construction.

    a is integer symmetric and T a polynomial in a, so a T is symmetric.  With
    Fourier modes X is a multiple of Y and each amplitude is parallel to Y k,
    which keeps u k^t T symmetric as well.
    """
    a = random_integer_symmetric(rng, n)
    torus = _commuting_torus(rng, a, proportional=fourier)
    modes = ()
    if fourier:
        modes = _modes(rng, n, int(rng.integers(1, 3)), direction=lambda k: torus.Y.T @ k)
    section = SectionData(a, rng.normal(size=n), modes, rng.normal(size=n))
    return torus, section


def generic_object(rng, n, fourier=False, min_asymmetry=1e-3):
    """(torus, section) with a T visibly non-symmetric (for n >= 2)."""
    while True:
        torus = random_torus(rng, n)
        a = rng.integers(-2, 3, size=(n, n))
        aT = a @ torus.T
        if n == 1 or np.max(np.abs(aT - aT.T)) > min_asymmetry:
            break
    modes = _modes(rng, n, int(rng.integers(1, 3))) if fourier else ()
    return torus, SectionData(a, rng.normal(size=n), modes, rng.normal(size=n))


def mixed_objects(seed, count, n_values=(1, 2, 3), stream="objects"):
    """``count`` (torus, section, tau, constructed_holomorphic) tuples.

    Even slots are built holomorphic, odd slots generic (n >= 2, since every
    n = 1 object is holomorphic); every other pair carries Fourier modes.
    """
    out = []
    for idx in range(count):
        rng = rng_for(seed, stream, idx)
        n = n_values[idx % len(n_values)]
        fourier = (idx // 2) % 2 == 1
        if idx % 2 == 0:
            torus, section = holomorphic_object(rng, n, fourier)
            built = True
        else:
            n = max(n, 2)
            torus, section = generic_object(rng, n, fourier)
            built = False
        out.append((torus, section, random_tau(rng, n), built))
    return out


def non_affine_counterexample():
    """A holomorphic object on C/(Z + iZ) whose dHYM phase is not constant.

    n = 1 makes every section holomorphic; the single mode makes ds/dx vary,
    so arg(-i + ds/dx) varies too.
    """
    torus = ComplexTorus(np.zeros((1, 1)), np.eye(1))
    section = SectionData(np.zeros((1, 1)), None, (((1,), [0.1], [0.0]),), None)
    return torus, section
