"""Compare the compiled and pure-Python optimiser kernels.

Runs the same seeded optimisation on planted block graphs of growing size
with both backends, checks the partitions are bit-identical, and prints a
timing table. Usage: python benchmarks/backend_benchmark.py [--runs N]
"""

import argparse
import time

import numpy as np

from collabnet.communities import available_backends, optimise_partition
from collabnet.communities.stability import Adjacency


def block_graph(n_blocks: int, block_size: int, seed: int) -> Adjacency:
    rng = np.random.default_rng(seed)
    n = n_blocks * block_size
    block = np.repeat(np.arange(n_blocks), block_size)
    mean = np.where(block[:, None] == block[None, :], 8.0, 0.8)
    w = rng.poisson(mean).astype(float)
    w = np.triu(w, 1)
    w = w + w.T
    return Adjacency(tuple(f"N{i}" for i in range(n)), w)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--runs", type=int, default=50,
                        help="optimiser restarts per graph (default 50)")
    args = parser.parse_args()

    backends = available_backends()
    if "cython" not in backends:
        print("compiled kernel not built; timing the pure backend only")

    sizes = [(4, 10), (5, 20), (6, 40), (8, 60)]
    print(f"{'nodes':>6} {'edges':>8} " +
          " ".join(f"{b + ' (s)':>12}" for b in backends) +
          ("   speedup" if len(backends) > 1 else ""))
    for n_blocks, block_size in sizes:
        adj = block_graph(n_blocks, block_size, seed=n_blocks)
        times = []
        partitions = []
        for backend in backends:
            start = time.perf_counter()
            res = optimise_partition(adj, gamma=1.0, seed=7, n_runs=args.runs,
                                     backend=backend)
            times.append(time.perf_counter() - start)
            partitions.append((res.partition.labels, res.run_scores))
        for other in partitions[1:]:
            assert other == partitions[0], "backends disagree"
        edges = int(np.count_nonzero(adj.weights) // 2)
        row = f"{adj.n:>6} {edges:>8} " + \
              " ".join(f"{t:>12.3f}" for t in times)
        if len(times) > 1:
            row += f"   {times[1] / times[0]:>6.1f}x"
        print(row)
    if len(backends) > 1:
        print("identical partitions and run scores on every graph")


if __name__ == "__main__":
    main()
