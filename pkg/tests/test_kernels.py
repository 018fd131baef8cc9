import os
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gerbymirror import _accel, gerbe, kernels

needs_numba = pytest.mark.skipif(not _accel.HAS_NUMBA, reason="numba not installed")
BACKENDS = ["numpy", pytest.param("numba", marks=needs_numba)]


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.pfaffian_expand(np.zeros((2, 2)), backend="cuda")


@pytest.mark.parametrize("backend", BACKENDS)
def test_pfaffian_examples(backend):
    assert kernels.pfaffian_expand(np.array([[0, 3], [-3, 0]]), backend) == 3
    J = np.kron(np.eye(3), [[0, 1], [-1, 0]])
    assert kernels.pfaffian_expand(J, backend) == pytest.approx(1)


@needs_numba
@given(st.integers(0, 10**6), st.sampled_from([2, 4, 6, 8]))
def test_pfaffian_backends_agree(seed, m):
    rng = np.random.default_rng(seed)
    raw = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    W = raw - raw.T
    a, b = kernels.pfaffian_expand(W, "numpy"), kernels.pfaffian_expand(W, "numba")
    assert abs(a - b) <= 1e-12 * max(1, abs(a))


@needs_numba
@given(st.integers(0, 10**6))
def test_wedge_backends_agree(seed):
    rng = np.random.default_rng(seed)
    f = rng.normal(size=64) + 1j * rng.normal(size=64)
    g = rng.normal(size=64)
    assert np.allclose(kernels.wedge_dense(f, g, "numpy"), kernels.wedge_dense(f, g, "numba"), atol=1e-12)


@needs_numba
@given(st.integers(0, 10**6), st.integers(1, 4))
def test_jacobian_backends_agree(seed, n):
    rng = np.random.default_rng(seed)
    a = rng.integers(-2, 3, size=(n, n))
    ks, us, vs = rng.integers(-3, 4, size=(3, n)), rng.normal(size=(3, n)), rng.normal(size=(3, n))
    pts = rng.uniform(size=(20, n))
    np.testing.assert_allclose(
        kernels.section_jacobians(a, ks, us, vs, pts, "numpy"),
        kernels.section_jacobians(a, ks, us, vs, pts, "numba"),
        atol=1e-12,
    )


@given(st.integers(0, 40), st.integers(1, 20), st.integers(0, 40), st.integers(1, 20))
def test_arc_meet_against_point_scan(a, la, b, lb):
    period = 48
    start, length = kernels.arc_meet(a, la, b, lb, period)
    # half-integer sample points inside each open arc
    pa = {(a + k) % period for k in range(la)}
    pb = {(b + k) % period for k in range(lb)}
    assert length == len(pa & pb)
    if length:
        assert {(start + k) % period for k in range(length)} == pa & pb


@pytest.mark.parametrize("rule", ["cocycle", "literal"])
@pytest.mark.parametrize("backend", BACKENDS)
def test_triple_sweep_backends_agree(rule, backend):
    eps = Fraction(1, 24)
    tau = np.array([[1, -1], [2, 0]])
    cover, forms, _ = gerbe.transition_table(2, tau, eps, rule)
    starts, lengths, period = gerbe._integer_arcs(cover, eps)
    got = kernels.triple_cocycle_sweep(starts, lengths, period, forms, backend)
    ref = kernels.triple_cocycle_sweep(starts, lengths, period, forms, "numpy")
    assert got == ref
    assert (got[1] == 0) == (rule == "cocycle")


def test_environment_flag_selects_numpy():
    env = dict(os.environ, GERBYMIRROR_NUMBA="0")
    out = subprocess.run(
        [sys.executable, "-c", "from gerbymirror import _accel; print(_accel.backend_name())"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "numpy"
