import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from gerbymirror import bundle_objects as bo
from gerbymirror import generators as gen
from gerbymirror.errors import ShapeError
from gerbymirror.torus_gcs import ComplexTorus

from conftest import finite, int_matrices, tori

SQUARE = ComplexTorus(np.zeros((2, 2)), np.eye(2))
NILPOTENT = np.array([[0, 1], [0, 0]])


def test_section_examples():
    s = bo.SectionData(np.eye(2))
    assert np.allclose(bo.eval_section(s, [0.25, 0.0]), [0.25, 0.0])
    assert bo.transition_factor(0, np.eye(2), [0.25, 0.0]) == pytest.approx(1j)
    assert bo.chart_transition(np.eye(2), [1, 0], [0.25, 0.0]) == pytest.approx(-1j)
    with pytest.raises(IndexError):
        bo.transition_factor(2, np.eye(2), [0, 0])


def test_section_validation():
    with pytest.raises(ShapeError):
        bo.SectionData(np.array([[0.5]]))
    with pytest.raises(ShapeError):
        bo.SectionData(np.eye(1), modes=(((-1,), [0.1], [0.0]),))
    with pytest.raises(ShapeError):
        bo.SectionData(np.eye(1), modes=(((5,), [0.1], [0.0]),))
    with pytest.raises(ShapeError):
        bo.SectionData(np.eye(1), modes=(((1,), [0.1], [0.0]), ((1,), [0.2], [0.0])))
    with pytest.raises(ShapeError):
        bo.BundleObject(SQUARE, bo.SectionData(np.eye(1)))


def test_zero_two_part_example():
    obj = bo.BundleObject(SQUARE, bo.SectionData(NILPOTENT))
    want = np.array([[0.0, -np.pi / 2], [np.pi / 2, 0.0]])
    assert np.allclose(bo.zero_two_part(obj, [0.3, 0.7]), want, atol=1e-14)
    assert np.allclose(bo.zero_two_part_by_basis_change(obj, [0.3, 0.7]), want, atol=1e-14)
    assert not bo.is_holomorphic(obj)


def test_half_torus_nilpotent_not_holomorphic(t_half):
    obj = bo.BundleObject(t_half, bo.SectionData(NILPOTENT))
    v = bo.is_holomorphic(obj)
    assert not v and v.max_violation > 0.5 and v.points_checked == 81
    assert bo.is_holomorphic(bo.BundleObject(t_half, bo.SectionData(np.eye(2))))


def test_sample_grid_includes_mode_extrema():
    s = bo.SectionData(np.eye(2), modes=(((1, 2), [0.1, 0], [0, 0]),))
    g = bo.sample_grid(2, s, steps=3)
    assert g.shape == (9 + 4, 2)
    assert np.allclose(g[-3], [0.05, 0.1])


@given(st.integers(0, 10**6), st.sampled_from([1, 2, 3]))
def test_jacobian_matches_finite_differences(seed, n):
    rng = gen.rng_for(seed, "fd")
    torus, s = gen.generic_object(rng, n, fourier=True)
    x = rng.uniform(size=n)
    h = 1e-6
    fd = np.column_stack([(bo.eval_section(s, x + h * e) - bo.eval_section(s, x - h * e)) / (2 * h) for e in np.eye(n)])
    assert np.allclose(bo.jacobian(s, x), fd, atol=1e-7)


@given(tori(), st.data())
def test_zero_two_part_two_routes(torus, data):
    n = torus.n
    a = data.draw(int_matrices(n))
    x = data.draw(arrays(np.float64, (n,), elements=finite))
    obj = bo.BundleObject(torus, bo.SectionData(a))
    assert np.allclose(bo.zero_two_part(obj, x), bo.zero_two_part_by_basis_change(obj, x), atol=1e-9)
    # curvature is tau independent and purely (dx, dy)
    F = bo.curvature(obj, x)
    assert np.allclose(F, -F.T) and np.allclose(F[:n, :n], 0) and np.allclose(F[n:, n:], 0)


@given(st.integers(0, 10**6), st.sampled_from([1, 2, 3]), st.booleans())
def test_holomorphic_iff_zero_two_part_vanishes(seed, n, built):
    rng = gen.rng_for(seed, "hol")
    make = gen.holomorphic_object if built or n == 1 else gen.generic_object
    torus, s = make(rng, n, fourier=bool(seed % 2))
    obj = bo.BundleObject(torus, s)
    hol = bo.is_holomorphic(obj)
    assert bool(hol) == bool(bo.zero_two_part_vanishes(obj))
    assert bool(hol) == (built or n == 1)


@settings(max_examples=10)
@given(st.integers(0, 10**6), st.sampled_from([1, 2]))
def test_transition_compatibility(seed, n):
    rng = gen.rng_for(seed, "compat")
    torus, s = gen.generic_object(rng, n, fourier=True)
    tau = gen.random_tau(rng, n)
    obj = bo.BundleObject(torus, s, tau)
    rep = bo.verify_transition_compat(obj)
    assert rep.passed and rep.pairs_checked == 9**n * 3**n
    if np.any(tau):
        assert not bo.verify_transition_compat(obj, include_twist=False).passed


def test_complex_coframe_inverts_coordinates(t_half):
    # (dz, dzbar) = (dx + T dy, dx + Tbar dy) inverted by P
    T = t_half.T
    n = 2
    forward = np.block([[np.eye(n), T], [np.eye(n), T.conj()]])
    assert np.allclose(forward @ bo.complex_coframe(T), np.eye(2 * n))
