"""Scan resolution times for plateaus of reproducible partitions."""

from __future__ import annotations

from itertools import combinations
from typing import Sequence

from ..errors import ConfigError
from .optimise import optimise_partition
from .stability import Adjacency

__all__ = ["resolution_scan"]


def resolution_scan(adj: Adjacency, tau_values: Sequence[float],
                    runs_per_tau: int = 20, seed: int = 0,
                    backend: str | None = None) -> list[tuple[float, float]]:
    """Mean pairwise variation of information across restarts, per tau.

    For each resolution time tau the optimiser runs ``runs_per_tau`` times
    (gamma = 1/tau, seeds seed..seed+runs_per_tau-1) and the normalised VI
    is averaged over all unordered pairs of resulting partitions. Low mean
    VI marks a tau whose partition is reproducible.
    """
    if runs_per_tau < 2:
        raise ConfigError("runs_per_tau must be >= 2 to compare runs")
    for tau in tau_values:
        if tau <= 0:
            raise ConfigError("tau values must be > 0")
    from ..partition_metrics import variation_of_information

    out: list[tuple[float, float]] = []
    for tau in tau_values:
        result = optimise_partition(adj, gamma=1.0 / tau, seed=seed,
                                    n_runs=runs_per_tau, backend=backend,
                                    keep_run_partitions=True)
        assert result.run_partitions is not None
        pairs = list(combinations(result.run_partitions, 2))
        mean_vi = (sum(variation_of_information(x, y) for x, y in pairs)
                   / len(pairs))
        out.append((float(tau), float(mean_vi)))
    return out
