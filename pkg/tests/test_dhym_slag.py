import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gerbymirror import dhym_slag as dh
from gerbymirror import generators as gen
from gerbymirror.bundle_objects import BundleObject, SectionData
from gerbymirror.errors import MirrorUndefined, NotHolomorphic, NotLagrangian
from gerbymirror.lagrangian_objects import GraphLagrangian
from gerbymirror.matrix_kernel import phase_distance
from gerbymirror.torus_gcs import ComplexTorus

from conftest import int_matrices, tori

LINE = ComplexTorus(np.zeros((1, 1)), np.eye(1))
SQUARE = ComplexTorus(np.zeros((2, 2)), np.eye(2))


def test_dhym_examples():
    assert dh.dhym_closed(LINE, [[0]]) == pytest.approx(2 * np.pi)
    r = dh.dhym_top_from_jacobian(LINE, [[1]])
    assert r.closed == pytest.approx(2 * np.pi + 2j * np.pi) and r.rel_error < 1e-12
    res = dh.dhym_phase(BundleObject(LINE, SectionData([[1]])))
    assert res.exists and res.theta == pytest.approx(3 * np.pi / 4)


def test_slag_examples():
    assert dh.slag_value_from_jacobian(LINE, [[0]], [[0]]).closed == pytest.approx(1)
    res = dh.slag_phase(GraphLagrangian(LINE, SectionData([[0]])))
    assert res.exists and res.theta == pytest.approx(0)
    with pytest.raises(MirrorUndefined):
        dh.mirror_period(SQUARE, [[0, 1], [-1, 0]])


def test_kahler_data_of_square_torus():
    d = dh.KahlerData.from_torus(SQUARE)
    I, Z = np.eye(2), np.zeros((2, 2))
    assert np.allclose(d.omega_coeff, 2 * np.pi * np.block([[Z, I], [-I, Z]]))
    assert np.allclose(d.g_coeff, 2 * np.pi * np.eye(4))
    assert np.allclose(d.J_coeff, np.block([[Z, -I], [I, Z]]))
    assert dh.kahler_verify(SQUARE).passed


@given(tori())
def test_kahler_lemma(torus):
    rep = dh.kahler_verify(torus)
    assert rep.passed and rep.g_min_eigenvalue > 0
    assert not dh.kahler_verify(torus, J=-dh.KahlerData.from_torus(torus).J_coeff).passed


@given(tori(), st.data())
def test_dhym_and_slag_two_routes(torus, data):
    n = torus.n
    if n == 4:
        return
    A = data.draw(int_matrices(n)).astype(float)
    assert dh.dhym_top_from_jacobian(torus, A).rel_error <= 1e-9
    tau = data.draw(int_matrices(n))
    try:
        r = dh.slag_value_from_jacobian(torus, tau, A)
    except MirrorUndefined:
        return
    assert r.rel_error <= 1e-9 or abs(r.closed - r.direct) <= 1e-12


def test_dhym_top_pointwise_matches_closed_form():
    rng = gen.rng_for(7, "dhym-test")
    torus, s = gen.generic_object(rng, 3, fourier=True)
    for x in rng.uniform(size=(5, 3)):
        assert dh.dhym_top(BundleObject(torus, s), x).rel_error <= 1e-9


def test_preconditions_raise(t_half):
    s = SectionData([[0, 1], [0, 0]])
    with pytest.raises(NotHolomorphic):
        dh.dhym_phase(BundleObject(t_half, s))
    with pytest.raises(NotLagrangian):
        dh.slag_phase(GraphLagrangian(t_half, s))
    rep = dh.equivalence_check(s, t_half)
    assert rep.agree and rep.dhym is None and "dHYM" in rep.reason


@given(st.integers(0, 10**6), st.sampled_from([1, 2, 3]))
def test_phase_equivalence_for_affine_holomorphic(seed, n):
    rng = gen.rng_for(seed, "equiv-test")
    torus, s = gen.holomorphic_object(rng, n)
    tau = gen.random_tau(rng, n)
    try:
        rep = dh.equivalence_check(s, torus, tau)
    except MirrorUndefined:
        return
    assert rep.agree and rep.dhym.exists and rep.slag.exists
    assert rep.delta_error <= 1e-9 and rep.delta_spread <= 1e-9
    assert phase_distance(rep.delta, rep.expected_delta) <= 1e-9


def test_untwisted_offset_is_zero():
    # with tau = 0 both phases coincide: arg((2 pi i)^n) = arg(det(-i Y)^{-1}) mod pi
    for n in (1, 2, 3):
        torus = gen.random_torus(gen.rng_for(1, "offset", n), n, symmetric=True)
        assert phase_distance(dh.expected_offset(torus, np.zeros((n, n))), 0.0) <= 1e-12


def test_non_affine_object_rejected_by_both():
    torus, s = gen.non_affine_counterexample()
    rep = dh.equivalence_check(s, torus)
    assert not rep.dhym.exists and not rep.slag.exists
    assert rep.dhym.max_phase_spread > 0.05 and math.isnan(rep.dhym.theta)
