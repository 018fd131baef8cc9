import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from gerbymirror.torus_gcs import ComplexTorus

settings.register_profile(
    "default", deadline=None, max_examples=40, derandomize=True, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

finite = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False, allow_infinity=False)


@st.composite
def tori(draw, n=None, symmetric=False):
    """Complex tori with Y = M M^t / n + I (+ antisymmetric part)."""
    n = draw(st.integers(1, 4)) if n is None else n
    X = draw(arrays(np.float64, (n, n), elements=finite))
    M = draw(arrays(np.float64, (n, n), elements=finite))
    Y = M @ M.T / n + np.eye(n)
    if not symmetric:
        K = draw(arrays(np.float64, (n, n), elements=finite))
        Y = Y + 0.5 * (K - K.T)
    return ComplexTorus(X, Y)


def int_matrices(n, bound=2):
    return arrays(np.int64, (n, n), elements=st.integers(-bound, bound))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def t_half():
    """T = [[i, 1/2], [1/2, i]]."""
    return ComplexTorus(0.5 * np.array([[0.0, 1.0], [1.0, 0.0]]), np.eye(2))
