"""Time the pure-Python and compiled projection kernels and check they agree.

Usage: python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from sqfock import kernels
from sqfock.numerics import gauss_hermite_rule

# (label, call, n, points, nodes): shapes met by heralded_fidelity, herald_batch and fock_expand
CASES = [
    ("project_one n=1, 120 pts", "one", 1, 120, 80),
    ("project_one n=3, 64x64x120 batch", "one", 3, 64 * 64 * 120, 80),
    ("project_all n=100, 240 pts", "all", 100, 240, 340),
]


def inputs(points, seed=0):
    rng = np.random.default_rng(seed)
    alpha = complex(1.7, 0.4)
    beta = rng.normal(size=points) + 1j * rng.normal(size=points)
    gamma = -0.5 * np.abs(beta) ** 2 + 0j
    return alpha, beta, gamma


def run_case(call, n, points, nodes, repeat):
    rule = gauss_hermite_rule(nodes)
    alpha, beta, gamma = inputs(points)
    func = kernels.project_one if call == "one" else kernels.project_all
    results, times = {}, {}
    for name in kernels.available_backends():
        kernels.set_backend(name)
        results[name] = func(n, alpha, beta, gamma, rule)
        times[name] = min(timeit.repeat(lambda: func(n, alpha, beta, gamma, rule),
                                        number=1, repeat=repeat))
    return results, times


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    previous = kernels.backend()
    backends = kernels.available_backends()
    print(f"backends: {', '.join(backends)} (default {previous})")
    print(f"{'case':36s} " + " ".join(f"{b + ' [s]':>12s}" for b in backends)
          + f" {'speedup':>8s} {'max rel diff':>13s}")
    try:
        for label, call, n, points, nodes in CASES:
            results, times = run_case(call, n, points, nodes, args.repeat)
            row = f"{label:36s} " + " ".join(f"{times[b]:12.5f}" for b in backends)
            if len(backends) > 1:
                ref, got = results["python"], results["cython"]
                diff = np.max(np.abs(got - ref)) / max(np.max(np.abs(ref)), 1e-300)
                row += f" {times['python'] / times['cython']:8.1f} {diff:13.2e}"
            print(row)
    finally:
        kernels.set_backend(previous)


if __name__ == "__main__":
    main()
