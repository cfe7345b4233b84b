"""Exhaustive partition search, the oracle for small networks."""

from __future__ import annotations

import numpy as np

from ..errors import EmptyNetworkError, TooLargeForEnumerationError
from ..partition import Partition
from .stability import Adjacency

__all__ = ["brute_force_partition"]

MAX_NODES = 10  # Bell(10) = 115975 partitions; beyond that enumeration explodes


def brute_force_partition(adj: Adjacency,
                          gamma: float = 1.0) -> tuple[Partition, float]:
    """Globally optimal partition by set-partition enumeration (n <= 10).

    Enumerates restricted-growth assignments (node 0 in community 0, node i
    joins an existing community or opens the next one) with incremental
    community sums, so each leaf costs O(n). Deterministic: the first
    partition attaining the best score wins.
    """
    n = adj.n
    if n > MAX_NODES:
        raise TooLargeForEnumerationError(
            f"{n} nodes; exhaustive search is limited to {MAX_NODES}")
    two_m = adj.total_weight
    if two_m == 0:
        raise EmptyNetworkError("network has no weight (2m = 0)")
    w = adj.weights
    k = adj.strengths
    inv2m = 1.0 / two_m

    labels = np.zeros(n, dtype=np.int64)
    comm_k = np.zeros(n, dtype=np.float64)   # strength per community
    comm_w = np.zeros(n, dtype=np.float64)   # ordered within-weight per community
    members: list[list[int]] = [[] for _ in range(n)]
    best_score = -np.inf
    best_labels = labels.copy()

    def assign(i: int, n_comm: int, score: float):
        nonlocal best_score, best_labels
        if i == n:
            if score > best_score:
                best_score = score
                best_labels = labels.copy()
            return
        ki = k[i]
        for c in range(n_comm + (1 if n_comm < n else 0)):
            w_to_c = 0.0
            for j in members[c]:
                w_to_c += w[i, j]
            old_k = comm_k[c]
            # community c gains node i: within-weight rises by both
            # orientations of its ties into c, the strength term re-squares
            delta = (2.0 * w_to_c * inv2m
                     - gamma * ((old_k + ki) * inv2m) ** 2
                     + gamma * (old_k * inv2m) ** 2)
            labels[i] = c
            comm_k[c] = old_k + ki
            comm_w[c] += 2.0 * w_to_c
            members[c].append(i)
            assign(i + 1, max(n_comm, c + 1), score + delta)
            members[c].pop()
            comm_w[c] -= 2.0 * w_to_c
            comm_k[c] = old_k
        labels[i] = 0

    assign(0, 0, 0.0)
    partition = Partition.from_labels(adj.nodes, best_labels)
    # recompute the winner's score non-incrementally for exactness
    from .stability import linearised_stability
    return partition, linearised_stability(adj, partition, gamma)
