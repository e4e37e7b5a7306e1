"""Compare the compiled and pure-Python DBM closure kernels.

    python benchmarks/bench_kernel.py [--repeat N]

Times raw closure on random matrices, then a full class graph exploration
with each kernel installed in turn.
"""

import argparse
import random
import time
from fractions import Fraction

from tpntwin import ExploreLimits, explore, kernel
from tpntwin.testing import random_conservative_net, random_product


def random_cells(rng, n):
    cells = []
    for i in range(n):
        for j in range(n):
            if i == j:
                cells.append(0)
            elif j == 0 and i:
                cells.append(rng.randint(0, 50) if rng.random() < 0.8 else None)
            elif i == 0:
                cells.append(-rng.randint(0, 5))
            else:
                cells.append(rng.randint(-5, 50) if rng.random() < 0.5 else None)
    return cells


def time_closure(fn, matrices, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        for cells, n in matrices:
            fn(list(cells), n)
        best = min(best, time.perf_counter() - start)
    return best


def time_explore(models, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        classes = sum(explore(m, ExploreLimits(max_classes=3000)).num_classes for m in models)
        best = min(best, time.perf_counter() - start)
    return best, classes


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if kernel.close_flat_native is None:
        raise SystemExit("compiled kernel not available; build it with `pip install -e .`")

    rng = random.Random(1)
    for n in (4, 8, 16):
        matrices = [(random_cells(rng, n), n) for _ in range(2000)]
        nat = time_closure(kernel.close_flat_native, matrices, args.repeat)
        py = time_closure(kernel.close_flat_py, matrices, args.repeat)
        print(f"closure dim {n:2d} x2000: cython {nat * 1e3:8.1f} ms  python {py * 1e3:8.1f} ms  "
              f"speedup {py / nat:5.1f}x")

    rng = random.Random(2)
    models = [random_product(rng, max_places=5, max_transitions=5) for _ in range(20)]
    models += [random_conservative_net(rng, "x", max_places=6, max_transitions=6) for _ in range(20)]
    saved = kernel.close_flat_native
    try:
        nat, classes = time_explore(models, args.repeat)
        kernel.close_flat_native = None
        py, _ = time_explore(models, args.repeat)
    finally:
        kernel.close_flat_native = saved
    print(f"explore 40 random models ({classes} classes): cython {nat:.2f} s  python {py:.2f} s  "
          f"speedup {py / nat:4.2f}x")


if __name__ == "__main__":
    main()
