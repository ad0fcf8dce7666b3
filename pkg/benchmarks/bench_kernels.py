"""Compiled vs pure-Python kernels.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from gpscurve import _kernels_py

try:
    from gpscurve import _kernels
except ImportError:  # extension not built
    _kernels = None


def cases(rng):
    phi = rng.uniform(0.1, 10, 8)
    x = rng.uniform(0, 10, 8)
    big_phi = rng.uniform(0.1, 10, 16)
    big_x = rng.uniform(0, 10, 16)
    b0 = rng.uniform(0, 2, 8)
    rates = rng.uniform(0, 3, 8)
    steps = np.full(10_000, 1e-3)
    return {
        "waterfill n=8": lambda k: k.waterfill(phi, x, 20.0),
        "subset_max n=16": lambda k: k.subset_max(big_phi, big_x, 40.0),
        "backlog_steps 10k x 8": lambda k: k.backlog_steps(b0, rates, 12.0, phi, steps),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(7)
    backends = [("python", _kernels_py)] + ([("cython", _kernels)] if _kernels else [])
    print(f"{'kernel':<22}" + "".join(f"{name:>12}" for name, _ in backends) + f"{'speedup':>10}")
    for label, fn in cases(rng).items():
        times = []
        for _, k in backends:
            number = 1 if "10k" in label or "16" in label else 200
            t = min(timeit.repeat(lambda: fn(k), number=number, repeat=args.repeat)) / number
            times.append(t)
        row = f"{label:<22}" + "".join(f"{t * 1e3:>10.3f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
