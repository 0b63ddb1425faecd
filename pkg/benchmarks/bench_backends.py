"""Compare the numba kernels with the numpy/scipy fallback.

    python3 benchmarks/bench_backends.py [--repeat N]

Timings exclude the first numba call (JIT compile, or cache load).
"""

import argparse
import time

import numpy as np

from vsi_ssa import _kernels
from vsi_ssa.params import REFERENCE
from vsi_ssa.sim_switched import simulate_switched
from vsi_ssa.steady_state import operating_point


def best_of(func, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        func()
        times.append(time.perf_counter() - start)
    return min(times)


def cases():
    rng = np.random.default_rng(0)
    n = 200_000
    g = rng.normal(size=(n + 1, 3)).astype(complex)
    x0 = np.zeros(3)
    a = -2260.27 + 0j
    samples = rng.normal(size=(n + 1, 14))
    op = operating_point(REFERENCE)
    return {
        "rk4_affine (2e5 steps x 3)": lambda b: _kernels.rk4_affine(a, g[:-1], g[:-1], g[1:], x0, 0.5e-6, backend=b),
        "moving_average (2e5 x 14, m=20)": lambda b: _kernels.moving_average(samples, 20, backend=b),
        "simulate_switched (100 ms)": lambda b: simulate_switched(REFERENCE, op, backend=b),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    print(f"{'case':<34}{'numba [ms]':>12}{'numpy [ms]':>12}{'ratio':>8}")
    for name, run in cases().items():
        run("numba")  # warm-up / compile
        t_nb = best_of(lambda: run("numba"), args.repeat)
        t_np = best_of(lambda: run("numpy"), args.repeat)
        print(f"{name:<34}{t_nb * 1e3:>12.2f}{t_np * 1e3:>12.2f}{t_np / t_nb:>8.2f}")


if __name__ == "__main__":
    main()
