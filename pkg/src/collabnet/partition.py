"""Partition of a node set into communities with dense integer labels."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import InvalidPartitionError

__all__ = ["Partition", "dense_labels"]


def dense_labels(raw: Iterable[int]) -> np.ndarray:
    """Relabel arbitrary integer labels to 0..c-1 by first appearance."""
    arr = np.asarray(list(raw) if not isinstance(raw, np.ndarray) else raw,
                     dtype=np.int64)
    if arr.size == 0:
        return arr
    _, first = np.unique(arr, return_index=True)
    appearance = arr[np.sort(first)]
    lookup = {int(v): i for i, v in enumerate(appearance)}
    return np.array([lookup[int(v)] for v in arr], dtype=np.int64)


@dataclass(frozen=True)
class Partition:
    """Assignment of named nodes to communities.

    Labels are dense integers 0..c-1; construction rejects anything else.
    ``period`` optionally records which time slice the partition describes.
    """

    nodes: tuple[str, ...]
    labels: tuple[int, ...]
    period: str | None = None

    def __post_init__(self):
        if len(self.nodes) != len(self.labels):
            raise InvalidPartitionError(
                f"{len(self.nodes)} nodes but {len(self.labels)} labels")
        if len(set(self.nodes)) != len(self.nodes):
            raise InvalidPartitionError("duplicate node names")
        if self.labels:
            seen = set(self.labels)
            if seen != set(range(len(seen))):
                raise InvalidPartitionError(
                    f"labels must be dense 0..c-1, got {sorted(seen)}")

    @classmethod
    def from_labels(cls, nodes: Iterable[str], raw_labels: Iterable[int],
                    period: str | None = None) -> "Partition":
        """Build a partition, densifying labels by first appearance."""
        nodes = tuple(nodes)
        dense = dense_labels(raw_labels)
        return cls(nodes, tuple(int(v) for v in dense), period)

    @classmethod
    def from_assignment(cls, assignment: Mapping[str, int],
                        period: str | None = None,
                        node_order: Iterable[str] | None = None) -> "Partition":
        nodes = tuple(node_order) if node_order is not None else tuple(sorted(assignment))
        return cls.from_labels(nodes, [assignment[n] for n in nodes], period)

    @property
    def assignment(self) -> dict[str, int]:
        return dict(zip(self.nodes, self.labels))

    @property
    def n_communities(self) -> int:
        return len(set(self.labels)) if self.labels else 0

    def label_array(self) -> np.ndarray:
        return np.asarray(self.labels, dtype=np.int64)

    def communities(self) -> list[frozenset[str]]:
        """Member sets indexed by community label."""
        groups: list[set[str]] = [set() for _ in range(self.n_communities)]
        for node, lab in zip(self.nodes, self.labels):
            groups[lab].add(node)
        return [frozenset(g) for g in groups]

    def restricted_to(self, keep: Iterable[str]) -> "Partition":
        """Partition induced on a subset of nodes (labels re-densified)."""
        keep = set(keep)
        pairs = [(n, l) for n, l in zip(self.nodes, self.labels) if n in keep]
        return Partition.from_labels([n for n, _ in pairs],
                                     [l for _, l in pairs], self.period)

    def same_nodes(self, other: "Partition") -> bool:
        return set(self.nodes) == set(other.nodes)

    def with_period(self, period: str | None) -> "Partition":
        return Partition(self.nodes, self.labels, period)
