"""Benchmark the compiled integration kernel against the numpy reference.

Usage: python benchmarks/bench_kernels.py [--repeat N]

Two representative workloads from the surface pipeline:
  * the real-axis pass (single trajectory, fine steps), and
  * one vertical sweep (many columns advanced together).
"""

import argparse
import time

import numpy as np

from nilcyl import _kernel_py
from nilcyl.frames import _initial_coeffs
from nilcyl.potentials import build_zeta, preset

try:
    from nilcyl import _speedup
except ImportError:
    _speedup = None


def workloads():
    _, pot = preset("identity_lemniscate")
    sup = build_zeta(pot)
    order = 16

    steps = 2048
    h = pot.period / steps
    zgrid = np.arange(2 * steps + 1) * (0.5 * h)
    yield ("real-axis pass (B=1, K=33, 2048 steps)",
           _initial_coeffs(order, 1), sup.values(zgrid)[:, None], h,
           1.0 + 0.0j, steps)

    ncols = 256
    vsteps = 64
    hy = 0.25 / vsteps
    xs = np.linspace(0.0, pot.period, ncols)
    svals = np.arange(2 * vsteps + 1) * (0.5 * hy)
    zs = xs[None, :] + 1j * svals[:, None]
    yield (f"vertical sweep (B={ncols}, K=33, {vsteps} steps)",
           _initial_coeffs(order, ncols), sup.values(zs), hy, 1j, vsteps)


def run(kernel, C0, Z, h, u, steps, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        kernel(C0, Z, h, u, steps)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    backends = [("python", _kernel_py.rk4_laurent)]
    if _speedup is not None:
        backends.append(("compiled", _speedup.rk4_laurent))
    else:
        print("note: compiled extension not built; benchmarking the "
              "fallback only")

    for label, C0, Z, h, u, steps in workloads():
        print(f"\n{label}")
        times = {}
        for name, kernel in backends:
            times[name] = run(kernel, C0, Z, h, u, steps, args.repeat)
            print(f"  {name:9s} {times[name] * 1e3:9.2f} ms")
        if len(times) == 2:
            print(f"  speedup   {times['python'] / times['compiled']:9.2f}x")


if __name__ == "__main__":
    main()
