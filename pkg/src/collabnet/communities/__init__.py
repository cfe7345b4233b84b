"""Community structure: stability score, optimiser, oracle, resolution scan."""

from ._backend import DEFAULT_BACKEND, available_backends, get_backend
from .brute import brute_force_partition
from .optimise import StabilityResult, optimise_partition
from .resolution import resolution_scan
from .stability import Adjacency, adjacency_from_counts, linearised_stability

__all__ = [
    "Adjacency",
    "StabilityResult",
    "adjacency_from_counts",
    "available_backends",
    "brute_force_partition",
    "DEFAULT_BACKEND",
    "get_backend",
    "linearised_stability",
    "optimise_partition",
    "resolution_scan",
]
