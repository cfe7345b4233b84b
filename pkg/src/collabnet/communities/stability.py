"""Weighted adjacency and the linearised stability partition score."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import EmptyNetworkError, SchemaError
from ..panel import PanelDataset
from ..partition import Partition

__all__ = ["Adjacency", "adjacency_from_counts", "linearised_stability"]


@dataclass(frozen=True, eq=False)
class Adjacency:
    """Symmetric non-negative weight matrix, zero diagonal by default.

    Aggregated networks carry self-loops: set ``allow_self_loops`` to keep
    a non-zero diagonal. A_ii enters both w_in and the strength k_i once
    (it already holds both orientations of its internal weight).
    """

    nodes: tuple[str, ...]
    weights: np.ndarray
    allow_self_loops: bool = False

    def __post_init__(self):
        w = np.ascontiguousarray(np.asarray(self.weights, dtype=np.float64))
        n = len(self.nodes)
        if w.shape != (n, n):
            raise SchemaError(f"weights shape {w.shape} != {(n, n)}")
        if len(set(self.nodes)) != n:
            raise SchemaError("duplicate node names")
        if (w < 0).any():
            raise SchemaError("weights must be non-negative")
        if not np.array_equal(w, w.T):
            raise SchemaError("weights must be symmetric")
        if not self.allow_self_loops and np.diagonal(w).any():
            raise SchemaError("diagonal must be zero")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def strengths(self) -> np.ndarray:
        return self.weights.sum(axis=1)

    @property
    def total_weight(self) -> float:
        """Sum over ordered pairs (2m)."""
        return float(self.weights.sum())

    @property
    def zero_strength(self) -> np.ndarray:
        return self.strengths == 0


def adjacency_from_counts(dataset: PanelDataset, period: str,
                          use_significance: bool = False) -> Adjacency:
    """One period's network: raw counts, or the clamped significance
    transform when ``use_significance`` is set (undefined pairs weight 0).
    Countries with zero strength are retained (they sit in singletons)."""
    if use_significance:
        from ..significance import collaboration_significance
        net = collaboration_significance(dataset, period)
        return Adjacency(dataset.codes, net.p_hat)
    counts = dataset.collaboration_matrix(period).astype(np.float64)
    return Adjacency(dataset.codes, counts)


def _aligned_labels(adj: Adjacency, partition: Partition) -> np.ndarray:
    if set(partition.nodes) != set(adj.nodes):
        raise SchemaError("partition nodes do not match adjacency nodes")
    assignment = partition.assignment
    return np.array([assignment[node] for node in adj.nodes], dtype=np.int64)


def linearised_stability(adj: Adjacency, partition: Partition,
                         gamma: float = 1.0) -> float:
    """Partition quality (1/2m) sum_ij [A_ij - gamma k_i k_j / 2m] d(x_i, x_j).

    At gamma = 1 this is the standard modularity of the weighted network.
    """
    two_m = adj.total_weight
    if two_m == 0:
        raise EmptyNetworkError("network has no weight (2m = 0)")
    labels = _aligned_labels(adj, partition)
    k = adj.strengths
    n_comm = int(labels.max()) + 1 if labels.size else 0
    score = 0.0
    for c in range(n_comm):
        mask = labels == c
        w_in = float(adj.weights[np.ix_(mask, mask)].sum())
        k_c = float(k[mask].sum())
        score += w_in / two_m - gamma * (k_c / two_m) ** 2
    return score
