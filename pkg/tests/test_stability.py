"""Linearised stability scoring and its modularity special case."""

import numpy as np
import pytest

from collabnet.communities import (Adjacency, adjacency_from_counts,
                                   linearised_stability)
from collabnet.errors import EmptyNetworkError, SchemaError
from collabnet.partition import Partition
from conftest import build_panel, random_adjacency


def newman_girvan(weights, labels):
    """Independent double-loop modularity, straight from the definition."""
    weights = np.asarray(weights, dtype=float)
    n = weights.shape[0]
    k = weights.sum(axis=1)
    two_m = weights.sum()
    q = 0.0
    for i in range(n):
        for j in range(n):
            if labels[i] == labels[j]:
                q += weights[i, j] / two_m - (k[i] * k[j]) / (two_m * two_m)
    return q


def adjacency(weights):
    weights = np.asarray(weights, dtype=float)
    nodes = tuple(f"N{i}" for i in range(weights.shape[0]))
    return Adjacency(nodes, weights)


def score(adj, labels, gamma=1.0):
    part = Partition.from_labels(adj.nodes, labels)
    return linearised_stability(adj, part, gamma=gamma)


def test_single_edge_whole_network_scores_zero():
    adj = adjacency([[0, 1], [1, 0]])
    assert score(adj, [0, 0]) == pytest.approx(0.0, abs=1e-15)
    # splitting the only edge loses the internal weight
    assert score(adj, [0, 1]) == pytest.approx(-0.5, abs=1e-15)


def test_two_disconnected_cliques_score_half():
    block = np.array([[0, 1, 1], [1, 0, 1], [1, 1, 0]], dtype=float)
    weights = np.zeros((6, 6))
    weights[:3, :3] = block
    weights[3:, 3:] = block
    adj = adjacency(weights)
    assert score(adj, [0, 0, 0, 1, 1, 1]) == pytest.approx(0.5, abs=1e-15)


def test_four_cycle_pairings():
    weights = np.zeros((4, 4))
    for i, j in ((0, 1), (1, 2), (2, 3), (3, 0)):
        weights[i, j] = weights[j, i] = 1
    adj = adjacency(weights)
    assert score(adj, [0, 0, 1, 1]) == pytest.approx(0.0, abs=1e-15)
    assert score(adj, [0, 0, 0, 0]) == pytest.approx(0.0, abs=1e-15)
    assert score(adj, [0, 1, 2, 3]) == pytest.approx(-0.25, abs=1e-15)


def test_matches_newman_girvan_at_gamma_one():
    rng = np.random.default_rng(21)
    for _ in range(40):
        adj = random_adjacency(rng, int(rng.integers(2, 12)))
        labels = rng.integers(0, 3, size=adj.n)
        part = Partition.from_labels(adj.nodes, labels)
        assert linearised_stability(adj, part, gamma=1.0) == pytest.approx(
            newman_girvan(adj.weights, labels), abs=1e-12)


def test_gamma_enters_linearly():
    rng = np.random.default_rng(4)
    adj = random_adjacency(rng, 8)
    labels = rng.integers(0, 3, size=8)
    part = Partition.from_labels(adj.nodes, labels)
    q1 = linearised_stability(adj, part, gamma=1.0)
    q2 = linearised_stability(adj, part, gamma=2.0)
    q_half = linearised_stability(adj, part, gamma=0.5)
    # Q(gamma) = A - gamma * B, so the three points are collinear
    assert q2 - q1 == pytest.approx(2 * (q1 - q_half), abs=1e-12)
    assert q2 < q1 < q_half  # B > 0 for any partition with a community


def test_partition_aligned_by_node_name():
    adj = adjacency([[0, 5, 0], [5, 0, 1], [0, 1, 0]])
    direct = score(adj, [0, 0, 1])
    shuffled = Partition.from_labels(("N2", "N0", "N1"), [1, 0, 0])
    assert linearised_stability(adj, shuffled) == pytest.approx(direct)
    with pytest.raises(SchemaError):
        linearised_stability(adj, Partition.from_labels(("A", "B", "C"),
                                                        [0, 0, 1]))


def test_self_loops_count_toward_internal_weight():
    # aggregated networks carry self-loops; they belong to w_in and k_i
    weights = np.array([[2.0, 1.0], [1.0, 0.0]])
    nodes = ("N0", "N1")
    adj = Adjacency(nodes, weights, allow_self_loops=True)
    part = Partition.from_labels(nodes, [0, 1])
    # 2m = 4, w_in(A) = 2, K_A = 3, K_B = 1
    expected = (2 / 4 - (3 / 4) ** 2) + (0 - (1 / 4) ** 2)
    assert linearised_stability(adj, part) == pytest.approx(expected, abs=1e-15)


def test_empty_network_rejected():
    adj = adjacency(np.zeros((3, 3)))
    with pytest.raises(EmptyNetworkError):
        score(adj, [0, 1, 2])


def test_adjacency_from_counts_uses_raw_or_significance(two_block_panel):
    raw = adjacency_from_counts(two_block_panel, "P1")
    np.testing.assert_array_equal(
        raw.weights, two_block_panel.collaboration_matrix("P1").astype(float))
    sig = adjacency_from_counts(two_block_panel, "P1", use_significance=True)
    assert (sig.weights <= 1.0).all() and (sig.weights >= 0.0).all()
    assert sig.weights[0, 0] == 0.0
