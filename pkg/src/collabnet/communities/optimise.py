"""Multi-level stability optimisation with seeded restarts.

Each run follows the move/refine/aggregate scheme: greedy local moves,
a refinement sweep that regroups each community from singletons (so badly
merged parts split), then aggregation of the refined groups carrying
within-group weight as self-loops, repeated to a fixed point. A final
local-move sweep on the original graph guarantees the returned partition
is single-node-move optimal. Runs r = 0..n_runs-1 use seeds seed + r; the
best score wins, earliest run on ties.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, EmptyNetworkError, SchemaError
from ..partition import Partition
from ._backend import DEFAULT_BACKEND, get_backend
from .stability import Adjacency, linearised_stability

__all__ = ["StabilityResult", "optimise_partition"]


@dataclass(frozen=True)
class StabilityResult:
    """Best partition found, its score, and how the search was run."""

    partition: Partition
    score: float
    gamma: float
    tau: float
    seed: int
    runs: int
    best_run_index: int
    run_scores: tuple[float, ...]
    backend: str
    run_partitions: tuple[Partition, ...] | None = field(default=None, repr=False)

    def to_json_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "tau": self.tau,
            "seed": self.seed,
            "runs": self.runs,
            "best_run_index": self.best_run_index,
            "score": self.score,
            "run_scores": list(self.run_scores),
            "backend": self.backend,
            "period": self.partition.period,
            "partition": self.partition.assignment,
        }


@dataclass
class _Level:
    """CSR view of one aggregation level (self-loops kept out of the CSR)."""

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray
    self_w: np.ndarray
    strength: np.ndarray


def _leaf_level(adj: Adjacency) -> _Level:
    w = adj.weights
    n = adj.n
    rows, cols = np.nonzero(w)
    off = rows != cols  # self-loops shift every move gain equally
    rows, cols = rows[off], cols[off]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
    return _Level(
        n=n,
        indptr=indptr,
        indices=cols.astype(np.int64),
        weights=w[rows, cols].astype(np.float64),
        self_w=np.diagonal(w).astype(np.float64),
        strength=w.sum(axis=1).astype(np.float64),
    )


def _dense(labels: np.ndarray) -> np.ndarray:
    """Relabel to 0..c-1 by first appearance (deterministic)."""
    uniq, first = np.unique(labels, return_index=True)
    remap = np.empty(int(uniq.max()) + 1, dtype=np.int64)
    remap[labels[np.sort(first)]] = np.arange(len(uniq), dtype=np.int64)
    return remap[labels]


def _aggregate(level: _Level, groups: np.ndarray, n_new: int) -> _Level:
    """Collapse refined groups into nodes; within-group weight becomes
    self-loops (both orientations), preserving strengths and 2m."""
    rows = np.repeat(np.arange(level.n, dtype=np.int64), np.diff(level.indptr))
    r, c = groups[rows], groups[level.indices]
    same = r == c
    self_w = (np.bincount(groups, weights=level.self_w, minlength=n_new)
              + np.bincount(r[same], weights=level.weights[same], minlength=n_new))
    r2, c2, w2 = r[~same], c[~same], level.weights[~same]
    key = r2 * n_new + c2
    order = np.argsort(key, kind="stable")
    key, w2 = key[order], w2[order]
    boundaries = np.flatnonzero(np.diff(key)) + 1
    starts = np.concatenate(([0], boundaries))
    sums = np.add.reduceat(w2, starts) if len(w2) else np.zeros(0)
    uniq_key = key[starts] if len(key) else np.zeros(0, dtype=np.int64)
    new_rows = (uniq_key // n_new).astype(np.int64)
    new_cols = (uniq_key % n_new).astype(np.int64)
    indptr = np.zeros(n_new + 1, dtype=np.int64)
    np.cumsum(np.bincount(new_rows, minlength=n_new), out=indptr[1:])
    return _Level(
        n=n_new,
        indptr=indptr,
        indices=new_cols,
        weights=sums.astype(np.float64),
        self_w=self_w,
        strength=np.bincount(groups, weights=level.strength, minlength=n_new),
    )


class _Workspace:
    """Scratch buffers shared across runs (sized to the leaf graph)."""

    def __init__(self, n: int):
        self.order = np.zeros(n, dtype=np.int64)
        self.comm_w = np.zeros(n, dtype=np.float64)
        self.touched = np.zeros(n, dtype=np.int64)


def _single_run(leaf: _Level, two_m: float, gamma: float, state: int,
                kern, ws: _Workspace,
                init_labels: np.ndarray | None = None) -> np.ndarray:
    level = leaf
    flat = np.arange(leaf.n, dtype=np.int64)
    if init_labels is None:
        labels = np.arange(leaf.n, dtype=np.int64)
    else:
        labels = _dense(np.asarray(init_labels, dtype=np.int64))
    while True:
        comm_strength = np.bincount(labels, weights=level.strength,
                                    minlength=level.n)
        comm_size = np.bincount(labels, minlength=level.n).astype(np.int64)
        _, state = kern.local_move(level.n, level.indptr, level.indices,
                                   level.weights, level.strength, two_m, gamma,
                                   labels, comm_strength, comm_size,
                                   ws.order, ws.comm_w, ws.touched, state)
        labels = _dense(labels)
        n_comm = int(labels.max()) + 1
        if n_comm == level.n:
            break
        refined = np.arange(level.n, dtype=np.int64)
        r_strength = level.strength.copy()
        r_size = np.ones(level.n, dtype=np.int64)
        _, state = kern.refine(level.n, level.indptr, level.indices,
                               level.weights, level.strength, two_m, gamma,
                               labels, refined, r_strength, r_size,
                               ws.order, ws.comm_w, ws.touched, state)
        groups = _dense(refined)
        n_new = int(groups.max()) + 1
        if n_new == level.n:
            break
        next_level = _aggregate(level, groups, n_new)
        # initial communities on the aggregate: where local moving left them
        init = np.empty(n_new, dtype=np.int64)
        init[groups[::-1]] = labels[::-1]  # first member's label wins
        labels = _dense(init)
        flat = groups[flat]
        level = next_level
    leaf_labels = labels[flat]
    # final sweep on the original graph: guarantees node-move optimality
    comm_strength = np.bincount(leaf_labels, weights=leaf.strength,
                                minlength=leaf.n)
    comm_size = np.bincount(leaf_labels, minlength=leaf.n).astype(np.int64)
    kern.local_move(leaf.n, leaf.indptr, leaf.indices, leaf.weights,
                    leaf.strength, two_m, gamma, leaf_labels, comm_strength,
                    comm_size, ws.order, ws.comm_w, ws.touched, state)
    return _dense(leaf_labels)


def optimise_partition(adj: Adjacency, gamma: float = 1.0, seed: int = 0,
                       n_runs: int = 100,
                       candidates: tuple[Partition, ...] = (),
                       backend: str | None = None,
                       keep_run_partitions: bool = False) -> StabilityResult:
    """Best partition over seeded restarts (plus polished candidates).

    Candidate partitions, if given, are polished by the same scheme starting
    from their assignment and compete in the max, so the returned score is
    never below a candidate's own. ``best_run_index`` counts restarts first,
    then candidates.
    """
    if n_runs < 1:
        raise ConfigError("n_runs must be >= 1")
    if gamma <= 0:
        raise ConfigError("gamma must be > 0")
    kern = get_backend(backend)
    backend_name = kern.BACKEND_NAME
    two_m = adj.total_weight
    if two_m == 0:
        raise EmptyNetworkError("network has no weight (2m = 0)")
    leaf = _leaf_level(adj)
    ws = _Workspace(adj.n)

    starts: list[np.ndarray | None] = [None] * n_runs
    for cand in candidates:
        if set(cand.nodes) != set(adj.nodes):
            raise SchemaError("candidate nodes do not match adjacency nodes")
        assignment = cand.assignment
        starts.append(np.array([assignment[v] for v in adj.nodes], dtype=np.int64))

    best_idx = -1
    best_score = -np.inf
    best_labels: np.ndarray | None = None
    run_scores: list[float] = []
    run_partitions: list[Partition] = []
    for r, init in enumerate(starts):
        labels = _single_run(leaf, two_m, gamma, seed + r, kern, ws, init)
        part = Partition.from_labels(adj.nodes, labels)
        score = linearised_stability(adj, part, gamma)
        run_scores.append(score)
        if keep_run_partitions:
            run_partitions.append(part)
        if score > best_score:
            best_score = score
            best_idx = r
            best_labels = labels
    assert best_labels is not None
    return StabilityResult(
        partition=Partition.from_labels(adj.nodes, best_labels),
        score=best_score,
        gamma=gamma,
        tau=1.0 / gamma,
        seed=seed,
        runs=n_runs,
        best_run_index=best_idx,
        run_scores=tuple(run_scores),
        backend=backend_name,
        run_partitions=tuple(run_partitions) if keep_run_partitions else None,
    )
