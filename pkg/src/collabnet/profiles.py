"""Production profiles: publication shares over time and their clustering.

A country's relative abundance in a period is its share of that period's
world output; its average prevalence re-normalises those shares across
periods so each country traces a unit-mass trajectory. Trajectories are
compared with a Kolmogorov-Smirnov distance on cumulative profiles and
grouped by complete-linkage agglomeration cut at a bounded cluster count.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import ConfigError, SchemaError, ZeroOutputPeriodError
from .panel import PanelDataset

__all__ = [
    "ProfileMatrix",
    "ProfileClustering",
    "relative_abundance",
    "average_prevalence",
    "ks_distance",
    "profile_distance_matrix",
    "cluster_profiles",
    "cluster_mean_series",
]


@dataclass(frozen=True, eq=False)
class ProfileMatrix:
    """Country-by-period share matrix with its normalisation kind."""

    countries: tuple[str, ...]
    periods: tuple[str, ...]
    values: np.ndarray
    kind: str  # "relative_abundance" (columns sum 1) or "average_prevalence" (rows sum 1)

    def row(self, country: str) -> np.ndarray:
        return self.values[self.countries.index(country)]


@dataclass(frozen=True)
class ProfileClustering:
    """Result of cutting the complete-linkage dendrogram.

    ``threshold_r`` is the height of the first merge *not* performed, so
    every within-cluster pairwise distance is strictly below it (clusters
    formed earlier all have smaller diameters).
    """

    labels: Mapping[str, int]
    threshold_r: float
    linkage: str = "complete"

    @property
    def n_clusters(self) -> int:
        return len(set(self.labels.values()))


def relative_abundance(dataset: PanelDataset) -> ProfileMatrix:
    """Share of world publications per country and period (columns sum 1)."""
    pubs = dataset.publications.astype(np.float64)
    totals = pubs.sum(axis=0)
    dead = np.flatnonzero(totals == 0)
    if dead.size:
        labels = [dataset.periods[k].label for k in dead]
        raise ZeroOutputPeriodError(f"periods with zero global output: {labels}")
    return ProfileMatrix(dataset.codes, dataset.period_labels,
                         pubs / totals, "relative_abundance")


def average_prevalence(dataset: PanelDataset) -> ProfileMatrix:
    """Relative abundance re-normalised per country (rows sum 1)."""
    r1 = relative_abundance(dataset)
    row_sums = r1.values.sum(axis=1)
    dead = np.flatnonzero(row_sums == 0)
    if dead.size:
        codes = [dataset.codes[i] for i in dead]
        raise SchemaError(f"countries with zero output in every period: {codes}")
    return ProfileMatrix(dataset.codes, dataset.period_labels,
                         r1.values / row_sums[:, None], "average_prevalence")


def ks_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Largest absolute gap between the cumulative profiles of two rows."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise SchemaError(f"profile shapes differ: {a.shape} vs {b.shape}")
    return float(np.abs(np.cumsum(a) - np.cumsum(b)).max())


def profile_distance_matrix(profiles: ProfileMatrix) -> np.ndarray:
    cum = np.cumsum(profiles.values, axis=1)
    return np.abs(cum[:, None, :] - cum[None, :, :]).max(axis=2)


def cluster_profiles(profiles: ProfileMatrix, max_clusters: int = 6) -> ProfileClustering:
    """Complete-linkage agglomeration stopped at ``max_clusters`` groups.

    Merges are performed while more than ``max_clusters`` clusters remain;
    equal-height candidates merge lowest index pair first. Cluster ids are
    assigned by descending size (ties by earliest member).
    """
    if max_clusters < 1:
        raise ConfigError("max_clusters must be >= 1")
    n = len(profiles.countries)
    if n == 0:
        raise SchemaError("no countries to cluster")
    dist = profile_distance_matrix(profiles)

    if max_clusters > n:
        members = [[i] for i in range(n)]
        threshold = 0.0
    else:
        clusters: list[list[int] | None] = [[i] for i in range(n)]
        linkage = dist.copy()  # complete-linkage distance between live clusters
        np.fill_diagonal(linkage, np.inf)
        active = n
        last_height = 0.0
        while active > max_clusters:
            flat = int(np.argmin(linkage))  # row-major: lowest-index pair on ties
            p, q = divmod(flat, n)
            if p > q:
                p, q = q, p
            last_height = float(linkage[p, q])
            clusters[p] = clusters[p] + clusters[q]  # type: ignore[operator]
            clusters[q] = None
            merged_row = np.maximum(linkage[p], linkage[q])
            linkage[p] = merged_row
            linkage[:, p] = merged_row
            linkage[p, p] = np.inf
            linkage[q, :] = np.inf
            linkage[:, q] = np.inf
            active -= 1
        if active >= 2:
            threshold = float(linkage.min())  # height of the first merge not made
        else:
            threshold = last_height
        members = [c for c in clusters if c is not None]

    order = sorted(range(len(members)),
                   key=lambda ci: (-len(members[ci]), min(members[ci])))
    labels: dict[str, int] = {}
    for rank, ci in enumerate(order):
        for i in members[ci]:
            labels[profiles.countries[i]] = rank
    labels = {c: labels[c] for c in profiles.countries}
    return ProfileClustering(labels=labels, threshold_r=threshold)


def cluster_mean_series(profiles: ProfileMatrix,
                        clustering: ProfileClustering) -> dict[int, dict[str, float]]:
    """Mean profile per cluster, keyed by cluster id then period label."""
    out: dict[int, dict[str, float]] = {}
    label_arr = np.array([clustering.labels[c] for c in profiles.countries])
    for cid in sorted(set(clustering.labels.values())):
        mean = profiles.values[label_arr == cid].mean(axis=0)
        out[cid] = {p: float(v) for p, v in zip(profiles.periods, mean)}
    return out
