"""Benchmark the compiled unicycle flow kernel against the pure-Python twin.

Usage: python benchmarks/bench_kernels.py [repeats]

Times a bundle of closed-loop RK4 flow intervals (the hot path of a
simulation run) on both backends and reports the speedup, after checking
that the end states agree bitwise.
"""

import sys
import time

import numpy as np

from otaform.kernels import VARIANT_PERPENDICULAR
from otaform.kernels import _unicycle_py as py

try:
    from otaform.kernels import _unicycle_cy as cy
except ImportError:
    cy = None

N_AGENTS = 60
N_STEPS = 100      # one 0.1 s interval at the default 1 ms step
SAMPLE_EVERY = 5


def make_cases(seed=0):
    rng = np.random.default_rng(seed)
    cases = []
    for _ in range(N_AGENTS):
        cases.append((rng.uniform(-5, 5), rng.uniform(-5, 5),
                      rng.uniform(0, 2 * np.pi),
                      rng.uniform(-5, 5), rng.uniform(-5, 5),
                      rng.uniform(1.0, 9.0), rng.uniform(-10.0, 10.0)))
    return cases


def run(mod, cases, repeats):
    ends = []
    start = time.perf_counter()
    for _ in range(repeats):
        ends = [mod.unicycle_flow(x, y, th, rx, ry, g, mu, 0.5, 1e-6,
                                  VARIANT_PERPENDICULAR, 1e-3, N_STEPS,
                                  SAMPLE_EVERY)[0]
                for x, y, th, rx, ry, g, mu in cases]
    elapsed = time.perf_counter() - start
    return elapsed / repeats, ends


def main():
    repeats = int(sys.argv[1]) if len(sys.argv) > 1 else 20
    cases = make_cases()
    t_py, ends_py = run(py, cases, repeats)
    print(f"pure python: {t_py * 1e3:8.2f} ms per bundle "
          f"({N_AGENTS} agents x {N_STEPS} RK4 steps)")
    if cy is None:
        print("compiled kernel not built; nothing to compare")
        return
    t_cy, ends_cy = run(cy, cases, repeats)
    print(f"cython:      {t_cy * 1e3:8.2f} ms per bundle")
    print(f"speedup:     {t_py / t_cy:8.1f}x")
    agree = all(np.array_equal(np.asarray(a), np.asarray(b))
                for a, b in zip(ends_py, ends_cy))
    print(f"end states bitwise identical: {agree}")
    if not agree:
        sys.exit(1)


if __name__ == "__main__":
    main()
