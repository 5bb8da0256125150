"""Compiled vs numpy classification kernels on deep polygon trees.

    python3 benchmarks/bench_kernels.py [--depth 10] [--repeat 3]
"""
import argparse
import time

import numpy as np

from mixgauge import kernels
from mixgauge.dyadic import CellTree
from mixgauge.geometry import comb, koch


def build(shape, depth, backend):
    t0 = time.perf_counter()
    tree = CellTree(shape, backend=backend).grow(depth)
    return time.perf_counter() - t0, tree


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--depth", type=int, default=10)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = ["python"]
    try:
        kernels.get_backend("cython")
        backends.insert(0, "cython")
    except ImportError:
        print("compiled backend unavailable; timing numpy only")
    print(f"{'shape':<8} {'backend':<8} {'nodes':>9} {'best s':>9}")
    for name, shape in (("comb16", comb(16)), ("koch4", koch(4))):
        trees = {}
        for b in backends:
            best = min(build(shape, args.depth, b)[0] for _ in range(args.repeat))
            _, trees[b] = build(shape, args.depth, b)
            print(f"{name:<8} {b:<8} {trees[b].node_count():>9} {best:>9.4f}")
        if len(trees) == 2:
            same = all(np.array_equal(x, y) for x, y in zip(trees["cython"].state, trees["python"].state))
            print(f"{name:<8} states identical across backends: {same}")


if __name__ == "__main__":
    main()
