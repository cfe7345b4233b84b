"""Significance weights against the configuration-model expectation."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from collabnet.errors import EmptyNetworkError
from collabnet.significance import (collaboration_significance,
                                    continental_mean_weights, export_network,
                                    significance_transform, threshold_edges)
from conftest import build_panel, random_count_matrix


def network_from_counts(counts, regions=None):
    counts = np.asarray(counts, dtype=np.int64)
    n = counts.shape[0]
    ds = build_panel([counts], regions or ["EU"] * n)
    return collaboration_significance(ds, "P1"), ds


def reference_significance(counts, i, j):
    counts = np.asarray(counts, dtype=float)
    two_m = counts.sum()
    return two_m * counts[i, j] / (counts[i].sum() * counts[j].sum())


def test_matches_reference_on_random_graphs():
    rng = np.random.default_rng(11)
    for _ in range(25):
        counts = random_count_matrix(rng, int(rng.integers(3, 9)))
        counts[counts.sum(axis=1) == 0, 0] = 0  # leave isolates as-is
        net, _ = network_from_counts(counts)
        k = counts.sum(axis=1)
        for i in range(counts.shape[0]):
            for j in range(counts.shape[0]):
                if i == j or k[i] == 0 or k[j] == 0:
                    assert np.isnan(net.s[i, j])
                else:
                    assert net.s[i, j] == pytest.approx(
                        reference_significance(counts, i, j), rel=1e-12)


# Both gadgets put specific pairs exactly at the configuration expectation:
# every strength is equal by construction, so s = 2m * n_ij / (k_i * k_j)
# collapses to an integer identity.
FOUR_NODE = np.array([
    [0, 1, 3, 0],
    [1, 0, 0, 3],
    [3, 0, 0, 1],
    [0, 3, 1, 0],
])

SIX_NODE = np.array([
    [0, 2, 3, 3, 0, 0],
    [2, 0, 0, 0, 3, 3],
    [3, 0, 0, 1, 0, 0],
    [3, 0, 1, 0, 0, 0],
    [0, 3, 0, 0, 0, 1],
    [0, 3, 0, 0, 1, 0],
])


@pytest.mark.parametrize("counts,pairs", [
    (FOUR_NODE, [(0, 1), (2, 3)]),
    (SIX_NODE, [(0, 1)]),
    (FOUR_NODE * 7, [(0, 1), (2, 3)]),  # scaling preserves the fixed point
])
def test_fixed_point_pairs_get_unit_significance(counts, pairs):
    net, _ = network_from_counts(counts)
    for i, j in pairs:
        assert net.s[i, j] == pytest.approx(1.0, abs=1e-12)
        assert net.p_hat[i, j] == 0.0


def test_transform_clamps_below_expectation():
    s = np.array([0.0, 0.5, 1.0, 3.0, np.nan])
    p = significance_transform(s)
    np.testing.assert_allclose(p[:4], [0.0, 0.0, 0.0, 0.5], atol=1e-15)
    assert np.isnan(p[4])


def test_transform_stays_below_one():
    s = np.array([1e9, 1e12])
    p = significance_transform(s)
    assert (p < 1.0).all()


def test_isolated_country_is_undefined_but_weightless():
    counts = np.zeros((4, 4), dtype=int)
    counts[0, 1] = counts[1, 0] = 5
    counts[1, 2] = counts[2, 1] = 5
    net, _ = network_from_counts(counts)
    assert not net.defined[3].any() and not net.defined[:, 3].any()
    assert np.isnan(net.s[3]).all()
    assert (net.p_hat[3] == 0).all() and (net.p_hat[:, 3] == 0).all()
    assert not net.defined.diagonal().any()


def test_empty_period_raises():
    with pytest.raises(EmptyNetworkError):
        network_from_counts(np.zeros((3, 3), dtype=int))


@settings(max_examples=150, deadline=None)
@given(st.integers(3, 10), st.integers(0, 2**32 - 1))
def test_row_average_against_partner_strengths_is_one(n, seed):
    # sum_j s_ij * k_j / 2m telescopes to sum_j n_ij / k_i = 1
    rng = np.random.default_rng(seed)
    counts = random_count_matrix(rng, n, density=1.0)
    net, _ = network_from_counts(counts)
    k = counts.sum(axis=1).astype(float)
    two_m = counts.sum()
    for i in range(n):
        others = [j for j in range(n) if j != i]
        total = sum(net.s[i, j] * k[j] / two_m for j in others)
        assert total == pytest.approx(1.0, abs=1e-9)


def test_threshold_is_strict_and_sorted():
    # pair (2,3) sits exactly at s = 2m * 1 / (2 * 2) = 3, i.e. p_hat = 0.5
    counts = np.array([
        [0, 1, 0, 0, 0, 0],
        [1, 0, 0, 0, 0, 0],
        [0, 0, 0, 1, 1, 0],
        [0, 0, 1, 0, 0, 1],
        [0, 0, 1, 0, 0, 2],
        [0, 0, 0, 1, 2, 0],
    ])
    net, _ = network_from_counts(counts)
    assert net.p_hat[2, 3] == pytest.approx(0.5, abs=1e-12)
    edges = threshold_edges(net, cutoff=0.5)
    assert all(w > 0.5 for _, _, w in edges)
    # only the detached pair beats its tiny expectation decisively
    assert [(a, b) for a, b, _ in edges] == [("C0", "C1")]
    weights = [w for _, _, w in edges]
    assert weights == sorted(weights, reverse=True)


def test_continental_means_cover_defined_ordered_pairs():
    counts = np.array([
        [0, 6, 2, 0],
        [6, 0, 0, 2],
        [2, 0, 0, 6],
        [0, 2, 6, 0],
    ])
    net, ds = network_from_counts(counts, ["EU", "EU", "AS", "AS"])
    table = continental_mean_weights(net, ds)
    assert table.loc["EU", "EU"] == pytest.approx(float(net.p_hat[0, 1]))
    cross = [net.p_hat[0, 2], net.p_hat[0, 3], net.p_hat[1, 2], net.p_hat[1, 3]]
    assert table.loc["EU", "AS"] == pytest.approx(float(np.mean(cross)))
    assert table.loc["EU", "AS"] == table.loc["AS", "EU"]


def test_positive_only_mean_drops_zero_entries():
    counts = np.array([
        [0, 6, 2, 0],
        [6, 0, 0, 2],
        [2, 0, 0, 6],
        [0, 2, 6, 0],
    ])
    net, ds = network_from_counts(counts, ["EU", "EU", "AS", "AS"])
    table = continental_mean_weights(net, ds, positive_only=True)
    cross = [w for w in (net.p_hat[0, 2], net.p_hat[0, 3],
                         net.p_hat[1, 2], net.p_hat[1, 3]) if w > 0]
    if cross:
        assert table.loc["EU", "AS"] == pytest.approx(float(np.mean(cross)))


def test_exports_are_deterministic(tmp_path):
    rng = np.random.default_rng(3)
    counts = random_count_matrix(rng, 6)
    net, ds = network_from_counts(counts, ["EU", "EU", "EU", "AS", "AS", "AS"])
    for fmt, name in (("csv", "edges.csv"), ("gexf", "net.gexf")):
        a, b = tmp_path / f"a_{name}", tmp_path / f"b_{name}"
        export_network(net, ds, a, fmt=fmt, cutoff=0.0)
        export_network(net, ds, b, fmt=fmt, cutoff=0.0)
        assert a.read_bytes() == b.read_bytes()
    text = (tmp_path / "a_edges.csv").read_text()
    assert text.splitlines()[0] == "source,target,weight"
    gexf = (tmp_path / "a_net.gexf").read_text()
    assert "1.2draft" in gexf and "undirected" in gexf
