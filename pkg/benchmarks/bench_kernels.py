"""Compare the numba and numpy kernel paths.

    python benchmarks/bench_kernels.py [--sizes 256 512 1024] [--repeat 5]

Times operator assembly and the seminorm double sum for each backend, checks
that both paths agree, and prints a small table. The first numba call (JIT or
cache load) is timed separately and excluded from the steady-state figures.
"""

import argparse
import time

import numpy as np

from fracsteady import _kernels
from fracsteady.fracop import unit_weights


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[256, 512, 1024])
    ap.add_argument("--s", type=float, default=0.5)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    if not _kernels.HAVE_NUMBA:
        print("numba not importable; only the numpy path can be timed")
    rng = np.random.default_rng(0)

    if _kernels.HAVE_NUMBA:
        g, d, k = unit_weights(8, args.s)
        _kernels.set_backend("numba")
        t0 = time.perf_counter()
        _kernels.assemble_unit(g, d, k)
        _kernels.seminorm_unit_sq(np.ones(8), g, d, k)
        print(f"numba first call (compile or cache load): {time.perf_counter() - t0:.3f} s")

    print(f"{'n':>6} {'kernel':>10} {'numpy [ms]':>12} {'numba [ms]':>12} {'speedup':>8} {'max diff':>10}")
    for n in args.sizes:
        g, d, k = unit_weights(n, args.s)
        u = rng.standard_normal(n)
        for name, call in (
            ("assemble", lambda: _kernels.assemble_unit(g, d, k)),
            ("seminorm", lambda: _kernels.seminorm_unit_sq(u, g, d, k)),
        ):
            _kernels.set_backend("numpy")
            ref = np.asarray(call())
            t_np = best_of(call, args.repeat)
            if _kernels.HAVE_NUMBA:
                _kernels.set_backend("numba")
                got = np.asarray(call())
                t_nb = best_of(call, args.repeat)
                diff = float(np.max(np.abs(got - ref)) / max(np.max(np.abs(ref)), 1e-300))
                print(
                    f"{n:>6} {name:>10} {1e3 * t_np:>12.3f} {1e3 * t_nb:>12.3f} "
                    f"{t_np / t_nb:>8.2f} {diff:>10.1e}"
                )
            else:
                print(f"{n:>6} {name:>10} {1e3 * t_np:>12.3f} {'-':>12} {'-':>8} {'-':>10}")


if __name__ == "__main__":
    main()
