"""Backend selection for the compiled kernels.

Set ``GERBYMIRROR_NUMBA=0`` in the environment to force the pure-numpy
paths.  When numba is not importable the numpy paths are used silently.
"""

import os

_FLAG = os.environ.get("GERBYMIRROR_NUMBA", "1").strip().lower()

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba ships in the dev environment
    numba = None
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and _FLAG not in ("0", "false", "no", "off")


def njit(fn):
    """``numba.njit(cache=True)`` when numba is importable, else identity."""
    if not HAS_NUMBA:
        return fn
    return numba.njit(cache=True)(fn)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
