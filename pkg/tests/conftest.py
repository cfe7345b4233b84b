"""Shared fixtures and builders for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from collabnet.communities import Adjacency
from collabnet.panel import CountryRecord, PanelDataset, PeriodSpec


def random_count_matrix(rng: np.random.Generator, n: int,
                        density: float = 0.7, max_count: int = 9) -> np.ndarray:
    """Symmetric non-negative integer matrix with zero diagonal."""
    counts = rng.integers(1, max_count + 1, size=(n, n))
    mask = rng.random((n, n)) < density
    counts = counts * mask
    counts = np.triu(counts, k=1)
    return (counts + counts.T).astype(np.int64)


def random_adjacency(rng: np.random.Generator, n: int,
                     density: float = 0.7) -> Adjacency:
    nodes = tuple(f"N{i}" for i in range(n))
    counts = random_count_matrix(rng, n, density)
    if counts.sum() == 0:
        counts[0, 1] = counts[1, 0] = 1
    return Adjacency(nodes, counts.astype(float))


def build_panel(counts_by_period: list[np.ndarray],
                regions: list[str],
                publications: np.ndarray | None = None) -> PanelDataset:
    """Panel from explicit matrices; codes are C0, C1, ... in order."""
    n = len(regions)
    countries = tuple(CountryRecord(f"C{i}", f"Country {i}", regions[i])
                      for i in range(n))
    periods = tuple(PeriodSpec(f"P{t + 1}", t + 1, t + 1)
                    for t in range(len(counts_by_period)))
    if publications is None:
        publications = np.full((n, len(periods)), 1000, dtype=np.int64)
    collaborations = np.stack([np.asarray(m, dtype=np.int64)
                               for m in counts_by_period])
    return PanelDataset(countries=countries, periods=periods,
                        publications=np.asarray(publications, dtype=np.int64),
                        collaborations=collaborations,
                        region_set=tuple(dict.fromkeys(regions)))


@pytest.fixture
def two_block_panel() -> PanelDataset:
    """Six countries, two regions, dense within-region collaboration."""
    counts = np.array([
        [0, 8, 7, 1, 0, 1],
        [8, 0, 9, 0, 1, 0],
        [7, 9, 0, 1, 0, 0],
        [1, 0, 1, 0, 8, 7],
        [0, 1, 0, 8, 0, 9],
        [1, 0, 0, 7, 9, 0],
    ], dtype=np.int64)
    pubs = np.array([[500], [600], [700], [800], [900], [1000]])
    return build_panel([counts], ["EU", "EU", "EU", "AS", "AS", "AS"], pubs)
