"""The 3^(2n)-box cover of the torus and the flat gerbe G_tau on it.

All cover geometry is exact: box endpoints are rationals, and the hot
triple-overlap sweep runs on integers after scaling the circle to a common
denominator.  Transition 1-forms only ever have coefficients 2*pi*(integer),
so they are stored as integer vectors in units of 2*pi.

Each box carries its own lifted coordinates: on axis j the box with index l
uses the real interval ((l-1)/3 - eps, l/3 + eps), so the l = 1 and l = 3
boxes meet across the seam x_j = 0 with lifted coordinates differing by 1.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .errors import ShapeError
from .matrix_kernel import DEFAULT_TOL

DEFAULT_EPSILON = Fraction(1, 24)

# Rule names for the transition 1-forms:
#   "cocycle" - coboundary of the chart-wise 1-forms 2 pi x^t tau^t dy: 2 pi tau
#               applied to the lift difference, for every overlapping pair.
#   "literal" - nonzero only on pairs that differ in a single l_j in {1, 3}
#               with m = m'; this family is not closed under the Cech
#               differential and is kept for comparison.
RULES = ("cocycle", "literal")


@dataclass(frozen=True, order=True)
class CoverIndex:
    l: tuple
    m: tuple

    def __post_init__(self):
        if len(self.l) != len(self.m):
            raise ShapeError("l and m must have the same length")
        if any(v not in (1, 2, 3) for v in self.l + self.m):
            raise ShapeError(f"cover labels must lie in {{1, 2, 3}}, got {self.l}; {self.m}")

    @property
    def n(self):
        return len(self.l)

    def labels(self):
        """l followed by m: one label per axis (x_1..x_n, y_1..y_n)."""
        return self.l + self.m

    def __str__(self):
        return "".join(map(str, self.l)) + ";" + "".join(map(str, self.m))


@dataclass(frozen=True)
class TorusBox:
    """Per-axis open arcs (start, length) on R/Z, axes ordered (x, y)."""

    arcs: tuple

    @property
    def n(self):
        return len(self.arcs) // 2

    def contains(self, point):
        return all(_arc_contains(a, p) for a, p in zip(self.arcs, point))

    def midpoint(self):
        return tuple((s + ln / 2) % 1 for s, ln in self.arcs)


def _arc_contains(arc, p):
    start, length = arc
    return 0 < (Fraction(p) - start) % 1 < length


def check_epsilon(epsilon):
    eps = Fraction(epsilon).limit_denominator(10**6) if isinstance(epsilon, float) else Fraction(epsilon)
    if not 0 < eps < Fraction(1, 12):
        raise ValueError(f"epsilon must lie in (0, 1/12), got {eps}")
    return eps


def axis_arc(label, epsilon):
    eps = Fraction(epsilon)
    return ((Fraction(label - 1, 3) - eps) % 1, Fraction(1, 3) + 2 * eps)


def box(index, epsilon=DEFAULT_EPSILON):
    eps = check_epsilon(epsilon)
    return TorusBox(tuple(axis_arc(v, eps) for v in index.labels()))


def cover_indices(n):
    labels = list(itertools.product((1, 2, 3), repeat=n))
    return [CoverIndex(l, m) for l in labels for m in labels]


def build_cover(n, epsilon=DEFAULT_EPSILON):
    """All 3^(2n) (index, box) pairs in lexicographic (l; m) order."""
    if n < 1:
        raise ValueError("n must be positive")
    eps = check_epsilon(epsilon)
    return [(idx, box(idx, eps)) for idx in cover_indices(n)]


def _meet(a, b):
    start, length = kernels.arc_meet(a[0], a[1], b[0], b[1], 1)
    return (start, length) if length > 0 else None


def overlap(i, j, epsilon=DEFAULT_EPSILON):
    """O_i cap O_j as per-axis arcs, or None when empty."""
    bi, bj = box(i, epsilon), box(j, epsilon)
    arcs = []
    for a, b in zip(bi.arcs, bj.arcs):
        m = _meet(a, b)
        if m is None:
            return None
        arcs.append(m)
    return TorusBox(tuple(arcs))


def triple_overlap(i, j, k, epsilon=DEFAULT_EPSILON):
    ij = overlap(i, j, epsilon)
    if ij is None:
        return None
    arcs = []
    for a, b in zip(ij.arcs, box(k, epsilon).arcs):
        m = _meet(a, b)
        if m is None:
            return None
        arcs.append(m)
    return TorusBox(tuple(arcs))


def lift(label, p, epsilon=DEFAULT_EPSILON):
    """Representative of p in R/Z inside the lifted interval of label."""
    lo = Fraction(label - 1, 3) - Fraction(epsilon)
    return (Fraction(p) - lo) % 1 + lo


def lift_shift(i, j, epsilon=DEFAULT_EPSILON):
    """Integer vector x^(j) - x^(i) of the x-lifts on O_i cap O_j."""
    ov = overlap(i, j, epsilon)
    if ov is None:
        raise ValueError(f"O_{i} and O_{j} do not overlap")
    mid = ov.midpoint()
    shift = []
    for ax in range(i.n):
        d = lift(j.l[ax], mid[ax], epsilon) - lift(i.l[ax], mid[ax], epsilon)
        if d.denominator != 1:
            raise AssertionError("lift difference is not an integer")
        shift.append(int(d))
    return np.array(shift, dtype=np.int64)


def _literal_units(i, j, tau):
    """Single-crossing rule in units of 2*pi, negated for (3, 1)."""
    if i.m != j.m:
        return None
    diff = [ax for ax in range(i.n) if i.l[ax] != j.l[ax]]
    if len(diff) != 1:
        return None
    ax = diff[0]
    pair = (i.l[ax], j.l[ax])
    if pair == (1, 3):
        return tau[:, ax].copy()
    if pair == (3, 1):
        return -tau[:, ax]
    return None


def transition_units(i, j, tau, epsilon=DEFAULT_EPSILON, rule="cocycle", antisymmetric=True):
    """Transition 1-form on O_i cap O_j as an integer dy-vector, units of 2*pi."""
    tau = np.asarray(tau, dtype=np.int64)
    if rule not in RULES:
        raise ValueError(f"rule must be one of {RULES}")
    if overlap(i, j, epsilon) is None:
        raise ValueError(f"O_{i} and O_{j} do not overlap")
    if rule == "cocycle":
        units = tau @ lift_shift(i, j, epsilon)
    else:
        units = _literal_units(i, j, tau)
        units = np.zeros(i.n, dtype=np.int64) if units is None else units
    if not antisymmetric and np.any(units) and _is_reverse(i, j):
        return np.zeros(i.n, dtype=np.int64)
    return units


def _is_reverse(i, j):
    # the (l_j = 3, l'_j = 1) direction obtained by antisymmetric completion
    return any(a == 3 and b == 1 for a, b in zip(i.l, j.l)) and not any(
        a == 1 and b == 3 for a, b in zip(i.l, j.l)
    )


def transition_form(i, j, tau, epsilon=DEFAULT_EPSILON, rule="cocycle"):
    """Real dy-coefficients (radians per unit y) of omega_{ij}."""
    return 2.0 * np.pi * transition_units(i, j, tau, epsilon, rule).astype(float)


# ---------------------------------------------------------------------------
# Cocycle verification
# ---------------------------------------------------------------------------


def _integer_arcs(cover, epsilon):
    eps = Fraction(epsilon)
    period = 3 * eps.denominator
    starts = np.empty((len(cover), 2 * cover[0][0].n), dtype=np.int64)
    lengths = np.empty_like(starts)
    for r, (_, bx) in enumerate(cover):
        for c, (s, ln) in enumerate(bx.arcs):
            starts[r, c] = int(s * period)
            lengths[r, c] = int(ln * period)
            if s * period != starts[r, c] or ln * period != lengths[r, c]:
                raise AssertionError("arc endpoints are not on the integer grid")
    return starts, lengths, period


@dataclass
class ZeroConnectionReport:
    n: int
    epsilon: Fraction
    rule: str
    pairs_checked: int
    antisymmetry_violations: int
    triples_checked: int
    cocycle_violations: int
    first_violation: tuple = None
    theta_quadruples_checked: int = 0
    backend: str = ""

    @property
    def passed(self):
        return self.antisymmetry_violations == 0 and self.cocycle_violations == 0


def _axis_tables(epsilon):
    """Per-axis data for every label pair (l, l'), computed exactly once.

    Boxes are products of axis arcs, so any pair-overlap question reduces to
    these 3 x 3 tables: whether the arcs meet, the integer lift shift on the
    meet, and the chart coordinates of two sample points of the meet.
    """
    meets = np.zeros((3, 3), dtype=bool)
    shifts = np.zeros((3, 3), dtype=np.int64)
    samples = np.zeros((3, 3, 2, 2))  # (l, l', point, chart)
    for l in (1, 2, 3):
        for lp in (1, 2, 3):
            m = _meet(axis_arc(l, epsilon), axis_arc(lp, epsilon))
            if m is None:
                continue
            meets[l - 1, lp - 1] = True
            start, length = m
            pts = ((start + length / 2) % 1, (start + length / 4) % 1)
            d = lift(lp, pts[0], epsilon) - lift(l, pts[0], epsilon)
            if d.denominator != 1:
                raise AssertionError("lift difference is not an integer")
            shifts[l - 1, lp - 1] = int(d)
            for k, p in enumerate(pts):
                samples[l - 1, lp - 1, k] = (float(lift(l, p, epsilon)), float(lift(lp, p, epsilon)))
    return meets, shifts, samples


def _label_array(cover):
    return np.array([idx.labels() for idx, _ in cover], dtype=np.int64) - 1


def transition_table(n, tau, epsilon=DEFAULT_EPSILON, rule="cocycle", antisymmetric=True):
    """(N, N, n) integer forms (units of 2 pi) plus the pair-overlap mask."""
    tau = np.asarray(tau, dtype=np.int64)
    if tau.shape != (n, n):
        raise ShapeError(f"tau must be {n} x {n}")
    if rule not in RULES:
        raise ValueError(f"rule must be one of {RULES}")
    eps = check_epsilon(epsilon)
    cover = build_cover(n, eps)
    lab = _label_array(cover)
    meets, shifts, _ = _axis_tables(eps)
    mask = np.all(meets[lab[:, None, :], lab[None, :, :]], axis=2)
    if rule == "cocycle":
        shift = shifts[lab[:, None, :n], lab[None, :, :n]]
        forms = np.einsum("ij,abj->abi", tau, shift)
    else:
        N = len(cover)
        forms = np.zeros((N, N, n), dtype=np.int64)
        for a, (i, _) in enumerate(cover):
            for b, (j, _) in enumerate(cover):
                u = _literal_units(i, j, tau)
                if u is not None:
                    forms[a, b] = u
    if not antisymmetric:
        lx = lab[:, :n]
        fwd = np.any((lx[:, None, :] == 0) & (lx[None, :, :] == 2), axis=2)
        rev = np.any((lx[:, None, :] == 2) & (lx[None, :, :] == 0), axis=2)
        forms = np.where((rev & ~fwd)[:, :, None], 0, forms)
    forms = np.where(mask[:, :, None], forms, 0)
    return cover, forms, mask


def verify_zero_connection(n, tau, epsilon=DEFAULT_EPSILON, rule="cocycle", antisymmetric=True, backend=None):
    """nabla_ijk theta_ijk = 0 on every nonempty triple overlap.

    With theta = 1 this is omega_ij + omega_jk + omega_ki = 0, checked on
    every ordered triple (repeats included) in exact integer arithmetic.
    """
    eps = check_epsilon(epsilon)
    cover, forms, mask = transition_table(n, tau, eps, rule, antisymmetric)
    anti = int(np.sum(mask & np.any(forms + forms.transpose(1, 0, 2) != 0, axis=2)))
    starts, lengths, period = _integer_arcs(cover, eps)
    count, bad, first = kernels.triple_cocycle_sweep(starts, lengths, period, forms, backend=backend)
    first_idx = None if bad == 0 else tuple(str(cover[v][0]) for v in first)
    quads = _theta_quadruples(cover, eps) if n == 1 else 0
    from . import _accel

    return ZeroConnectionReport(
        n=n,
        epsilon=eps,
        rule=rule,
        pairs_checked=int(mask.sum()),
        antisymmetry_violations=anti,
        triples_checked=count,
        cocycle_violations=bad,
        first_violation=first_idx,
        theta_quadruples_checked=quads,
        backend=backend or _accel.backend_name(),
    )


def _subset_meets(epsilon):
    """nonempty[mask]: do the axis arcs of the labels in ``mask`` share a point?"""
    nonempty = np.zeros(8, dtype=bool)
    for mask in range(1, 8):
        arc = None
        for l in (1, 2, 3):
            if not mask >> (l - 1) & 1:
                continue
            nxt = axis_arc(l, epsilon)
            arc = nxt if arc is None else _meet(arc, nxt)
            if arc is None:
                break
        nonempty[mask] = arc is not None
    return nonempty


def _theta_quadruples(cover, epsilon):
    """Exhaustive (delta theta)_ijkl = 1 check over nonempty quadruple overlaps.

    theta is identically 1, so every alternating product is 1; the work is
    enumerating the quadruples, done exactly through per-axis label subsets.
    """
    lab = _label_array(cover)
    N = len(cover)
    bits = (1 << lab).astype(np.int64)
    q = np.stack(np.meshgrid(*([np.arange(N)] * 4), indexing="ij"), axis=-1).reshape(-1, 4)
    masks = bits[q[:, 0]] | bits[q[:, 1]] | bits[q[:, 2]] | bits[q[:, 3]]
    live = np.all(_subset_meets(epsilon)[masks], axis=1)
    theta = np.ones((N, N, N), dtype=np.int64)
    i, j, k, l = q[live].T
    value = theta[j, k, l] * theta[i, k, l] * theta[i, j, l] * theta[i, j, k]
    if np.any(value != 1):
        raise AssertionError("delta theta != 1")
    return int(live.sum())


# ---------------------------------------------------------------------------
# 1-connection
# ---------------------------------------------------------------------------


def b_field_form(tau):
    """-i * 2 pi dx^t tau^t dy as a 2n x 2n coefficient matrix."""
    tau = np.asarray(tau, dtype=float)
    n = tau.shape[0]
    up = -2j * np.pi * tau.T
    Z = np.zeros((n, n), dtype=complex)
    return np.block([[Z, up], [-up.T, Z]])


def default_local_b(tau):
    B = b_field_form(tau)
    return lambda index, x: B


@dataclass
class OneConnectionReport:
    n: int
    pairs_checked: int
    points_checked: int
    max_curvature: float
    max_delta_beta_error: float
    worst_pair: tuple = None
    tol: float = DEFAULT_TOL.abs_tol

    @property
    def passed(self):
        return self.max_curvature <= self.tol and self.max_delta_beta_error <= self.tol


def verify_one_connection(n, tau, epsilon=DEFAULT_EPSILON, local_b=None, tol=DEFAULT_TOL):
    """The family -i B_m^l is a 1-connection compatible with nabla.

    ``local_b(index, x)`` returns the local 2-form on a chart as a 2n x 2n
    coefficient matrix at chart coordinates x; the default is the global
    -2 pi i dx^t tau^t dy.  Checks, at two sample points of every overlap,
    that the 1-form of nabla_ij has the same coefficients (so its curvature
    vanishes) and that (delta beta)_ij = beta_j - beta_i equals that zero
    curvature.
    """
    eps = check_epsilon(epsilon)
    tau = np.asarray(tau, dtype=np.int64)
    local_b = local_b or default_local_b(tau)
    cover, forms, mask = transition_table(n, tau, eps)
    lab = _label_array(cover)
    _, _, samples = _axis_tables(eps)
    axes = np.arange(2 * n)
    pairs = points = 0
    worst = max_curv = 0.0
    worst_pair = None
    for a, (i, _) in enumerate(cover):
        for b, (j, _) in enumerate(cover):
            if not mask[a, b]:
                continue
            pairs += 1
            pts = samples[lab[a], lab[b]]  # (2n axes, point, chart)
            coeffs = []
            for k in range(2):
                xi, xj = pts[axes, k, 0], pts[axes, k, 1]
                # nabla_ij = d - i omega_ij; its coefficients at this point
                coeffs.append(2.0 * np.pi * forms[a, b])
                delta = np.asarray(local_b(j, xj)) - np.asarray(local_b(i, xi))
                err = float(np.max(np.abs(delta)))
                points += 1
                if err > worst:
                    worst, worst_pair = err, (str(i), str(j))
            max_curv = max(max_curv, float(np.max(np.abs(coeffs[0] - coeffs[1]))))
    return OneConnectionReport(n, pairs, points, max_curv, worst, worst_pair, tol.abs_tol)


def uncovered_points(n, epsilon=DEFAULT_EPSILON, grid=100):
    """Grid points k/grid of the torus lying in no box (expected: none).

    The cover is a full product over axes, so a point is covered iff every
    coordinate lies in some axis arc; that reduces the scan to one axis.
    """
    eps = check_epsilon(epsilon)
    arcs = [axis_arc(v, eps) for v in (1, 2, 3)]
    bad = [Fraction(k, grid) for k in range(grid) if not any(_arc_contains(a, Fraction(k, grid)) for a in arcs)]
    return [(p,) * (2 * n) for p in bad]
