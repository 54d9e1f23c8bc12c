"""Timing comparison of the compiled and pure-python oscillatory sums.

Run as: python3 benchmarks/bench_core.py [n_targets] [n_nodes]
"""

import sys
import time

import numpy as np

from fiolab import backend


def bench(fn, *args, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    n_targets = int(sys.argv[1]) if len(sys.argv) > 1 else 512
    n_nodes = int(sys.argv[2]) if len(sys.argv) > 2 else 200_000
    rng = np.random.default_rng(0)
    targets = rng.standard_normal((n_targets, 2))
    nodes = rng.standard_normal((n_nodes, 2)) * 20.0
    coeffs = (rng.standard_normal(n_nodes)
              + 1j * rng.standard_normal(n_nodes))

    out_py = np.empty(n_targets, dtype=np.complex128)
    t_py = bench(backend._osc_sum_python, targets, nodes, coeffs, 1.0, out_py)
    print("python backend:   %.3f s  (%.2f M node-target pairs/s)"
          % (t_py, n_targets * n_nodes / t_py / 1e6))

    if backend._compiled is None:
        print("compiled backend: not built")
        return
    out_c = np.zeros(n_targets, dtype=np.complex128)
    t_c = bench(backend._compiled.osc_sum_direct,
                np.ascontiguousarray(targets), np.ascontiguousarray(nodes),
                np.ascontiguousarray(coeffs), 1.0, out_c)
    print("compiled backend: %.3f s  (%.2f M node-target pairs/s)"
          % (t_c, n_targets * n_nodes / t_c / 1e6))
    print("speed ratio python/compiled: %.2f" % (t_py / t_c))

    err = np.max(np.abs(out_py - out_c)) / np.max(np.abs(out_py))
    print("max relative disagreement: %.2e" % err)


if __name__ == "__main__":
    main()
