"""Time the numba kernels against the numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from defml.analysis import jacobi_matrix, recurrence_beta
from defml.kernels import BACKENDS


def cases():
    x = np.linspace(-30.0, 30.0, 20000)
    beta = recurrence_beta(40, 1.0)
    yield "monic_values n=40 pts=20000", "monic_values", (x, beta, 40)
    for n in (20, 200):
        b = jacobi_matrix(n, 1.0).offdiag
        yield f"tridiag_ql n={n}", "tridiag_ql", (b, n)
        yield f"bisect_eigvals n={n}", "bisect_eigvals", (b, n)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'case':32s} {'numpy ms':>10s} {'numba ms':>10s} {'speedup':>8s}")
    for label, name, call_args in cases():
        times = {}
        outs = {}
        for backend, fns in BACKENDS.items():
            fn = fns[name]
            outs[backend] = fn(*call_args)  # warm-up, includes jit compile
            t = timeit.repeat(lambda: fn(*call_args), number=1, repeat=args.repeat)
            times[backend] = min(t) * 1e3
        a, b = outs["numpy"], outs["numba"]
        a = a if isinstance(a, tuple) else (a,)
        b = b if isinstance(b, tuple) else (b,)
        assert all(np.allclose(u, v, rtol=1e-12, atol=1e-13) for u, v in zip(a, b)), label
        print(f"{label:32s} {times['numpy']:10.3f} {times['numba']:10.3f} "
              f"{times['numpy'] / times['numba']:7.1f}x")


if __name__ == "__main__":
    main()
