import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from gerbymirror import exterior_forms as ef
from gerbymirror.errors import NotAntisymmetric, ShapeError
from gerbymirror.matrix_kernel import pfaffian

from conftest import finite


def random_form(rng, dim, degree):
    import itertools

    return ef.ExteriorForm(
        dim, degree, {idx: complex(*rng.normal(size=2)) for idx in itertools.combinations(range(dim), degree)}
    )


def test_wedge_examples():
    dx1 = ef.ExteriorForm.basis(4, 0)
    assert (dx1 ^ dx1).coeffs == {}
    w = ef.two_form_from_matrix(np.kron(np.eye(2), [[0, 1], [-1, 0]])[[0, 2, 1, 3]][:, [0, 2, 1, 3]])
    # basis (dx1, dx2, dy1, dy2): w = dx1^dy1 + dx2^dy2
    assert w.allclose(ef.ExteriorForm(4, 2, {(0, 2): 1, (1, 3): 1}))
    sq = ef.wedge(w, w)
    assert ef.top_coefficient(sq) == pytest.approx(2.0)


def test_constructor_sorts_with_sign():
    f = ef.ExteriorForm(3, 2, {(1, 0): 2.0})
    assert f[(0, 1)] == -2.0
    assert ef.ExteriorForm(3, 2, {(1, 1): 5.0}).coeffs == {}
    with pytest.raises(ShapeError):
        ef.ExteriorForm(9, 1)
    with pytest.raises(ShapeError):
        ef.wedge(ef.ExteriorForm.basis(2, 0), ef.ExteriorForm.basis(4, 0))


def test_interleaving_sign_by_parity():
    assert [ef.interleaving_sign(n) for n in (1, 2, 3, 4)] == [1, -1, -1, 1]
    assert ef.permutation_sign([1, 0]) == -1
    assert ef.permutation_sign([1, 2, 0]) == 1


def test_top_coefficient_examples():
    assert ef.top_coefficient(ef.ExteriorForm.basis(2, 0, 1)) == 1
    # dx1 ^ dx2 ^ dy1 ^ dy2 is one transposition away from dx1 ^ dy1 ^ dx2 ^ dy2
    assert ef.top_coefficient(ef.ExteriorForm.basis(4, 0, 1, 2, 3)) == -1
    with pytest.raises(ShapeError):
        ef.top_coefficient(ef.ExteriorForm.basis(4, 0, 1))


def test_two_form_round_trip(rng):
    assert ef.two_form_from_matrix(np.zeros((4, 4))).coeffs == {}
    assert ef.two_form_from_matrix([[0, 1], [-1, 0]]).allclose(ef.ExteriorForm.basis(2, 0, 1))
    raw = rng.normal(size=(6, 6))
    W = raw - raw.T
    assert np.allclose(ef.matrix_from_two_form(ef.two_form_from_matrix(W)), W)
    with pytest.raises(NotAntisymmetric):
        ef.two_form_from_matrix(np.eye(2))


def test_power_edge_cases():
    w = ef.ExteriorForm.basis(2, 0, 1)
    assert ef.power(w, 0).coeffs == {(): 1}
    assert ef.power(w, 2).coeffs == {}
    with pytest.raises(ValueError):
        ef.power(w, -1)


@given(st.integers(0, 10**6), st.integers(1, 3), st.integers(1, 3), st.integers(0, 2))
def test_graded_commutativity_and_associativity(seed, p, q, r):
    rng = np.random.default_rng(seed)
    f, g, h = random_form(rng, 6, p), random_form(rng, 6, q), random_form(rng, 6, r)
    assert ef.wedge(f, g).allclose((-1) ** (p * q) * ef.wedge(g, f), atol=1e-10)
    assert ef.wedge(f, ef.wedge(g, h)).allclose(ef.wedge(ef.wedge(f, g), h), atol=1e-10)
    assert ef.wedge(f + f, g).allclose(2 * ef.wedge(f, g), atol=1e-10)


@given(st.sampled_from([1, 2, 3, 4]), arrays(np.float64, (8, 8), elements=finite))
def test_top_power_is_factorial_times_pfaffian(n, raw):
    W = raw[: 2 * n, : 2 * n] - raw[: 2 * n, : 2 * n].T
    got = ef.top_power_coefficient(W)
    want = math.factorial(n) * pfaffian(W) * ef.interleaving_sign(n)
    assert abs(got - want) <= 1e-9 * max(1.0, abs(want))
    assert ef.pfaffian_identity_value(W, pfaffian(W)) == want


def test_pullback_identity_and_congruence(rng):
    f = random_form(rng, 4, 2)
    assert ef.pullback(f, np.eye(4)).allclose(f, atol=1e-12)
    for _ in range(100):
        raw = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        W = raw - raw.T
        M = rng.normal(size=(4, 3))
        got = ef.matrix_from_two_form(ef.pullback(ef.two_form_from_matrix(W), M))
        assert np.allclose(got, M.T @ W @ M, atol=1e-12)


def test_pullback_of_top_form_is_determinant(rng):
    M = rng.normal(size=(4, 4))
    vol = ef.ExteriorForm.basis(4, 0, 1, 2, 3)
    assert ef.pullback(vol, M)[(0, 1, 2, 3)] == pytest.approx(np.linalg.det(M))
