"""Comparing partitions: information metrics, flows, and score ratios."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NodeSetMismatchError
from .panel import PanelDataset
from .partition import Partition
from .communities.stability import Adjacency, linearised_stability

logger = logging.getLogger(__name__)

__all__ = [
    "ABSENT",
    "FlowRecord",
    "nmi",
    "variation_of_information",
    "jaccard_flows",
    "continental_partition",
    "stability_ratio",
]

ABSENT = -1  # reserved flow community for nodes missing from one side


def _joint_counts(x: Partition, y: Partition) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if not x.same_nodes(y):
        raise NodeSetMismatchError("partitions cover different node sets")
    y_of = y.assignment
    xl = x.label_array()
    yl = np.array([y_of[node] for node in x.nodes], dtype=np.int64)
    joint = np.zeros((x.n_communities, y.n_communities), dtype=np.int64)
    np.add.at(joint, (xl, yl), 1)
    return joint, joint.sum(axis=1), joint.sum(axis=0)


def nmi(x: Partition, y: Partition) -> float:
    """Mutual information normalised by the mean of the two entropies.

    1 for identical partitions, 0 for independent ones. When both
    partitions are trivial (one community each) the value is defined as 1
    if they are identical and 0 otherwise.
    """
    joint, nx, ny = _joint_counts(x, y)
    n = float(joint.sum())
    p = nx / n
    q = ny / n
    hx = float(-(p[p > 0] * np.log(p[p > 0])).sum())
    hy = float(-(q[q > 0] * np.log(q[q > 0])).sum())
    if hx + hy == 0.0:
        # both trivial; node sets match, so identical iff same shape
        return 1.0 if x.n_communities == y.n_communities else 0.0
    r = joint / n
    pq = p[:, None] * q[None, :]
    pos = r > 0
    mi = float((r[pos] * np.log(r[pos] / pq[pos])).sum())
    return 2.0 * mi / (hx + hy)


def variation_of_information(x: Partition, y: Partition) -> float:
    """Variation of information normalised by log N into [0, 1].

    0 for identical partitions; 1 between all-singletons and all-in-one.
    """
    joint, nx, ny = _joint_counts(x, y)
    n = float(joint.sum())
    if n < 2:
        raise ConfigError("variation of information needs at least 2 nodes")
    r = joint / n
    p = nx / n
    q = ny / n
    pos = r > 0
    rp = r / p[:, None]
    rq = r / q[None, :]
    total = float((r[pos] * (np.log(rp[pos]) + np.log(rq[pos]))).sum())
    return -total / math.log(n)


@dataclass(frozen=True)
class FlowRecord:
    """Shared membership between a community at t and one at t+1.

    Community ``ABSENT`` (-1) collects nodes present on the other side only.
    """

    from_period: str | None
    to_period: str | None
    from_community: int
    to_community: int
    shared: int
    jaccard: float


def jaccard_flows(x: Partition, y: Partition, color_threshold: float = 0.6,
                  ) -> tuple[list[FlowRecord], dict[int, int]]:
    """Overlap flows between two partitions on possibly different node sets.

    Returns every overlapping (from, to) community pair with its shared
    count and Jaccard index, plus a colour-inheritance map: each community
    of ``y`` matched one-to-one to a community of ``x`` with Jaccard
    strictly above ``color_threshold`` (greedy, best Jaccard first, ties by
    larger intersection then lower labels). The ABSENT community never
    matches.
    """
    x_sets: dict[int, set[str]] = {c: set() for c in range(x.n_communities)}
    for node, lab in zip(x.nodes, x.labels):
        x_sets[lab].add(node)
    y_sets: dict[int, set[str]] = {c: set() for c in range(y.n_communities)}
    for node, lab in zip(y.nodes, y.labels):
        y_sets[lab].add(node)
    only_y = set(y.nodes) - set(x.nodes)
    only_x = set(x.nodes) - set(y.nodes)
    if only_y:
        x_sets[ABSENT] = only_y
    if only_x:
        y_sets[ABSENT] = only_x

    flows: list[FlowRecord] = []
    for xl in sorted(x_sets):
        for yl in sorted(y_sets):
            shared = x_sets[xl] & y_sets[yl]
            if not shared:
                continue
            union = x_sets[xl] | y_sets[yl]
            flows.append(FlowRecord(
                from_period=x.period, to_period=y.period,
                from_community=xl, to_community=yl,
                shared=len(shared), jaccard=len(shared) / len(union)))

    candidates = sorted(
        (f for f in flows
         if f.jaccard > color_threshold
         and f.from_community != ABSENT and f.to_community != ABSENT),
        key=lambda f: (-f.jaccard, -f.shared, f.from_community, f.to_community))
    inherit: dict[int, int] = {}
    used_from: set[int] = set()
    for f in candidates:
        if f.to_community in inherit or f.from_community in used_from:
            continue
        inherit[f.to_community] = f.from_community
        used_from.add(f.from_community)
    return flows, inherit


def continental_partition(dataset: PanelDataset,
                          period: str | None = None) -> Partition:
    """Partition grouping countries by region, labelled in region-set order."""
    present = [r for r in dataset.region_set
               if any(c.region == r for c in dataset.countries)]
    rank = {r: i for i, r in enumerate(present)}
    return Partition.from_labels(
        dataset.codes, [rank[c.region] for c in dataset.countries], period)


def stability_ratio(adj: Adjacency, partition: Partition,
                    reference: Partition, gamma: float = 1.0) -> float:
    """Score of ``partition`` relative to ``reference`` (e.g. continents).

    NaN when the reference scores exactly zero.
    """
    ref_score = linearised_stability(adj, reference, gamma)
    score = linearised_stability(adj, partition, gamma)
    if ref_score == 0.0:
        logger.warning("reference partition scores 0; ratio undefined")
        return math.nan
    return score / ref_score
