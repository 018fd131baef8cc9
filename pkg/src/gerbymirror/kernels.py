"""Hot inner loops, each with a numba path and a pure-numpy path.

Every public function takes ``backend=None`` (follow the environment flag),
``"numba"`` or ``"numpy"``.  Both paths must return identical results; the
test-suite runs them side by side and ``benchmarks/bench_kernels.py`` times
them.
"""

import numpy as np

from . import _accel
from ._accel import njit


def _pick(backend):
    if backend is None:
        return "numba" if _accel.USE_NUMBA else "numpy"
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not _accel.HAS_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend


# ---------------------------------------------------------------------------
# Pfaffian by first-row expansion
# ---------------------------------------------------------------------------


def _pfaffian_numpy(m):
    n = m.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    total = 0.0 + 0.0j
    rest = np.arange(1, n)
    for pos, j in enumerate(rest):
        if m[0, j] == 0:
            continue
        # (-1)**(j+1) with 0-based j
        sign = 1.0 if j % 2 == 1 else -1.0
        keep = np.delete(rest, pos)
        total += sign * m[0, j] * _pfaffian_numpy(m[np.ix_(keep, keep)])
    return total


@njit
def _pfaffian_numba(m):
    n = m.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    total = 0.0 + 0.0j
    sub = np.empty((n - 2, n - 2), dtype=np.complex128)
    for j in range(1, n):
        if m[0, j] == 0:
            continue
        r = 0
        for a in range(1, n):
            if a == j:
                continue
            c = 0
            for b in range(1, n):
                if b == j:
                    continue
                sub[r, c] = m[a, b]
                c += 1
            r += 1
        sign = 1.0 if j % 2 == 1 else -1.0
        total += sign * m[0, j] * _pfaffian_numba(sub.copy())
    return total


def pfaffian_expand(m, backend=None):
    """Pfaffian of an even-order antisymmetric complex matrix (no checks)."""
    m = np.ascontiguousarray(m, dtype=np.complex128)
    if _pick(backend) == "numba":
        return complex(_pfaffian_numba(m))
    return complex(_pfaffian_numpy(m))


# ---------------------------------------------------------------------------
# Wedge product of dense bitmask-indexed forms
# ---------------------------------------------------------------------------
# A form on a d-dimensional space is a complex array of length 2**d; entry
# ``mask`` is the coefficient of e^{i1} ^ ... ^ e^{ik} with i1 < ... < ik the
# set bits of ``mask``.


@njit
def _merge_sign(s, t):
    # parity of the shuffle that sorts (bits of s, bits of t)
    inv = 0
    tt = t
    j = 0
    while tt:
        if tt & 1:
            above = s >> (j + 1)
            while above:
                inv += above & 1
                above >>= 1
        tt >>= 1
        j += 1
    return -1.0 if inv & 1 else 1.0


@njit
def _wedge_numba(f, g):
    size = f.shape[0]
    out = np.zeros(size, dtype=np.complex128)
    for s in range(size):
        fs = f[s]
        if fs == 0:
            continue
        for t in range(size):
            gt = g[t]
            if gt == 0 or (s & t) != 0:
                continue
            out[s | t] += _merge_sign(s, t) * fs * gt
    return out


_SIGN_TABLES = {}


def merge_sign_table(dim):
    """(2**dim, 2**dim) table of shuffle signs; zero where masks overlap."""
    table = _SIGN_TABLES.get(dim)
    if table is None:
        size = 1 << dim
        masks = np.arange(size, dtype=np.int64)
        bits = ((masks[:, None] >> np.arange(dim)) & 1).astype(np.int64)
        # number of set bits strictly above position j, per mask
        above = np.cumsum(bits[:, ::-1], axis=1)[:, ::-1] - bits
        inv = bits @ above.T  # inv[t, s] = sum_j t_j * above_s(j)
        table = np.where(inv.T % 2 == 1, -1.0, 1.0)
        table[(masks[:, None] & masks[None, :]) != 0] = 0.0
        _SIGN_TABLES[dim] = table
    return table


def _wedge_numpy(f, g):
    size = f.shape[0]
    dim = size.bit_length() - 1
    table = merge_sign_table(dim)
    fs = np.flatnonzero(f)
    gt = np.flatnonzero(g)
    out = np.zeros(size, dtype=np.complex128)
    if fs.size == 0 or gt.size == 0:
        return out
    signs = table[np.ix_(fs, gt)]
    vals = signs * np.outer(f[fs], g[gt])
    target = fs[:, None] | gt[None, :]
    np.add.at(out, target[signs != 0], vals[signs != 0])
    return out


def wedge_dense(f, g, backend=None):
    f = np.ascontiguousarray(f, dtype=np.complex128)
    g = np.ascontiguousarray(g, dtype=np.complex128)
    if f.shape != g.shape:
        raise ValueError("dense forms must live on the same space")
    if _pick(backend) == "numba":
        return _wedge_numba(f, g)
    return _wedge_numpy(f, g)


# ---------------------------------------------------------------------------
# Circular arcs in exact integer arithmetic (circle of circumference `period`)
# ---------------------------------------------------------------------------


@njit
def _arc_meet(a, la, b, lb, period):
    d1 = (b - a) % period
    if d1 < la:
        return b, min(la - d1, lb)
    d2 = (a - b) % period
    if d2 < lb:
        return a, min(lb - d2, la)
    return 0, 0


def arc_meet(a, la, b, lb, period):
    """Intersection of two open arcs, each shorter than half the circle."""
    d1 = (b - a) % period
    if d1 < la:
        return b, min(la - d1, lb)
    d2 = (a - b) % period
    if d2 < lb:
        return a, min(lb - d2, la)
    return 0, 0


def _arc_meet_vec(a, la, b, lb, period):
    d1 = np.mod(b - a, period)
    d2 = np.mod(a - b, period)
    first = d1 < la
    second = ~first & (d2 < lb)
    start = np.where(first, b, np.where(second, a, 0))
    length = np.where(
        first, np.minimum(la - d1, lb), np.where(second, np.minimum(lb - d2, la), 0)
    )
    return start, length


# ---------------------------------------------------------------------------
# Triple-overlap cocycle sweep
# ---------------------------------------------------------------------------
# starts, lengths: (N, axes) int64 arcs of every cover element
# forms: (N, N, n) int64 transition coefficients in units of 2*pi


@njit
def _triple_sweep_numba(starts, lengths, period, forms):
    count = 0
    bad = 0
    first = np.full(3, -1, dtype=np.int64)
    N, axes = starts.shape
    n = forms.shape[2]
    ps = np.zeros((N, N, axes), dtype=np.int64)
    pl = np.zeros((N, N, axes), dtype=np.int64)
    pair_ok = np.zeros((N, N), dtype=np.bool_)
    for i in range(N):
        for j in range(N):
            ok = True
            for ax in range(axes):
                s, l = _arc_meet(
                    starts[i, ax], lengths[i, ax], starts[j, ax], lengths[j, ax], period
                )
                ps[i, j, ax] = s
                pl[i, j, ax] = l
                if l <= 0:
                    ok = False
            pair_ok[i, j] = ok
    for i in range(N):
        for j in range(N):
            if not pair_ok[i, j]:
                continue
            for k in range(N):
                if not (pair_ok[j, k] and pair_ok[i, k]):
                    continue
                ok = True
                for ax in range(axes):
                    s, l = _arc_meet(
                        ps[i, j, ax], pl[i, j, ax], starts[k, ax], lengths[k, ax], period
                    )
                    if l <= 0:
                        ok = False
                        break
                if not ok:
                    continue
                count += 1
                for c in range(n):
                    if forms[i, j, c] + forms[j, k, c] + forms[k, i, c] != 0:
                        if bad == 0:
                            first[0] = i
                            first[1] = j
                            first[2] = k
                        bad += 1
                        break
    return count, bad, first


def _triple_sweep_numpy(starts, lengths, period, forms):
    N, axes = starts.shape
    ps, pl = _arc_meet_vec(
        starts[:, None, :], lengths[:, None, :], starts[None, :, :], lengths[None, :, :], period
    )
    pair_ok = np.all(pl > 0, axis=2)
    count = 0
    bad = 0
    first = np.full(3, -1, dtype=np.int64)
    for i in range(N):
        js = np.flatnonzero(pair_ok[i])
        if js.size == 0:
            continue
        # (J, K, axes) meet of pair-arc (i, j) with arc k
        _, tl = _arc_meet_vec(
            ps[i, js][:, None, :],
            pl[i, js][:, None, :],
            starts[None, :, :],
            lengths[None, :, :],
            period,
        )
        live = np.all(tl > 0, axis=2) & pair_ok[js][:, :] & pair_ok[i][None, :]
        jj, kk = np.nonzero(live)
        if jj.size == 0:
            continue
        jidx = js[jj]
        total = forms[i, jidx] + forms[jidx, kk] + forms[kk, i]
        wrong = np.any(total != 0, axis=1)
        count += int(jj.size)
        nbad = int(wrong.sum())
        if nbad and bad == 0:
            w = int(np.flatnonzero(wrong)[0])
            first[:] = (i, jidx[w], kk[w])
        bad += nbad
    return count, bad, first


def triple_cocycle_sweep(starts, lengths, period, forms, backend=None):
    """Check w_ij + w_jk + w_ki = 0 on every nonempty ordered triple overlap.

    Returns ``(triples_checked, violations, first_violation)`` where the
    first violation is in lexicographic (i, j, k) order, or (-1, -1, -1).
    """
    starts = np.ascontiguousarray(starts, dtype=np.int64)
    lengths = np.ascontiguousarray(lengths, dtype=np.int64)
    forms = np.ascontiguousarray(forms, dtype=np.int64)
    if _pick(backend) == "numba":
        count, bad, first = _triple_sweep_numba(starts, lengths, np.int64(period), forms)
    else:
        count, bad, first = _triple_sweep_numpy(starts, lengths, int(period), forms)
    return int(count), int(bad), tuple(int(v) for v in first)


# ---------------------------------------------------------------------------
# Jacobians of integer-affine + trigonometric sections over a point cloud
# ---------------------------------------------------------------------------


@njit
def _jacobians_numba(a, ks, us, vs, pts):
    P, n = pts.shape
    m = ks.shape[0]
    out = np.empty((P, n, n))
    twopi = 2.0 * np.pi
    for p in range(P):
        for r in range(n):
            for c in range(n):
                out[p, r, c] = a[r, c]
        for q in range(m):
            ph = 0.0
            for c in range(n):
                ph += ks[q, c] * pts[p, c]
            ph *= twopi
            sn = np.sin(ph)
            cs = np.cos(ph)
            for r in range(n):
                w = twopi * (-us[q, r] * sn + vs[q, r] * cs)
                for c in range(n):
                    out[p, r, c] += w * ks[q, c]
    return out


def _jacobians_numpy(a, ks, us, vs, pts):
    out = np.broadcast_to(a, (pts.shape[0],) + a.shape).copy()
    if ks.shape[0] == 0:
        return out
    ph = 2.0 * np.pi * pts @ ks.T
    w = -np.sin(ph)[:, :, None] * us[None] + np.cos(ph)[:, :, None] * vs[None]
    out += 2.0 * np.pi * np.einsum("pqr,qc->prc", w, ks)
    return out


def section_jacobians(a, ks, us, vs, pts, backend=None):
    """Analytic Jacobians ds/dx at each row of ``pts`` -> (P, n, n)."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    n = a.shape[0]
    ks = np.ascontiguousarray(np.reshape(ks, (-1, n)), dtype=np.float64)
    us = np.ascontiguousarray(np.reshape(us, (-1, n)), dtype=np.float64)
    vs = np.ascontiguousarray(np.reshape(vs, (-1, n)), dtype=np.float64)
    pts = np.ascontiguousarray(np.reshape(pts, (-1, n)), dtype=np.float64)
    if _pick(backend) == "numba":
        return _jacobians_numba(a, ks, us, vs, pts)
    return _jacobians_numpy(a, ks, us, vs, pts)
