"""Time each compiled kernel against its pure-numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit
from fractions import Fraction

import numpy as np

from gerbymirror import _accel, gerbe, kernels


def cases():
    rng = np.random.default_rng(0)
    raw = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    W = raw - raw.T
    f = rng.normal(size=256) + 0j
    g = rng.normal(size=256) + 0j
    a = rng.integers(-2, 3, size=(3, 3))
    ks, us, vs = rng.integers(-3, 4, size=(4, 3)), rng.normal(size=(4, 3)), rng.normal(size=(4, 3))
    pts = rng.uniform(size=(2000, 3))
    eps = Fraction(1, 24)
    cover, forms, _ = gerbe.transition_table(2, np.array([[1, 2], [-1, 0]]), eps)
    starts, lengths, period = gerbe._integer_arcs(cover, eps)
    return {
        "pfaffian_expand (8x8)": lambda b: kernels.pfaffian_expand(W, b),
        "wedge_dense (dim 8)": lambda b: kernels.wedge_dense(f, g, b),
        "section_jacobians (2000 pts, n=3)": lambda b: kernels.section_jacobians(a, ks, us, vs, pts, b),
        "triple_cocycle_sweep (n=2)": lambda b: kernels.triple_cocycle_sweep(starts, lengths, period, forms, b),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    backends = ["numpy"] + (["numba"] if _accel.HAS_NUMBA else [])
    print(f"{'kernel':36s}" + "".join(f"{b:>12s}" for b in backends) + ("     speedup" if len(backends) == 2 else ""))
    for name, fn in cases().items():
        times = []
        for b in backends:
            fn(b)  # warm-up (includes JIT compilation)
            number = 3
            times.append(min(timeit.repeat(lambda: fn(b), number=number, repeat=args.repeat)) / number)
        row = f"{name:36s}" + "".join(f"{t * 1e3:10.3f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
