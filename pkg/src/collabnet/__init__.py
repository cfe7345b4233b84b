"""Temporal country-collaboration network analysis.

Builds country-by-period publication panels, production profiles,
collaboration-entropy decompositions, significance-filtered networks,
stability-optimal community sequences, and divergence diagnostics, with a
reproducible end-to-end pipeline behind the ``collabnet`` command.
"""

__version__ = "0.1.0"

from .errors import CollabnetError
from .panel import (DEFAULT_PERIODS, CountryRecord, PanelDataset, PeriodSpec,
                    filter_min_production, load_panel, merge_entities,
                    read_dataset_json, write_dataset_json)
from .partition import Partition
from .profiles import (ProfileClustering, ProfileMatrix, average_prevalence,
                       cluster_profiles, ks_distance, profile_distance_matrix,
                       relative_abundance)
from .diversity import (EntropyRecord, collaboration_entropy, entropy_table,
                        within_region_entropy_share)
from .significance import (SignificanceNetwork, collaboration_significance,
                           significance_transform, threshold_edges)
from .divergence import KLRecord, kl_divergence_to_config, kl_row
from .communities import (Adjacency, StabilityResult, adjacency_from_counts,
                          brute_force_partition, linearised_stability,
                          optimise_partition, resolution_scan)
from .partition_metrics import (continental_partition, jaccard_flows, nmi,
                                stability_ratio, variation_of_information)
from .synth import SynthConfig, generate_panel, neutral_within_mix
from .pipeline import run_pipeline

__all__ = [
    "__version__", "CollabnetError",
    "DEFAULT_PERIODS", "CountryRecord", "PanelDataset", "PeriodSpec",
    "filter_min_production", "load_panel", "merge_entities",
    "read_dataset_json", "write_dataset_json",
    "Partition",
    "ProfileClustering", "ProfileMatrix", "average_prevalence",
    "cluster_profiles", "ks_distance", "profile_distance_matrix",
    "relative_abundance",
    "EntropyRecord", "collaboration_entropy", "entropy_table",
    "within_region_entropy_share",
    "SignificanceNetwork", "collaboration_significance",
    "significance_transform", "threshold_edges",
    "KLRecord", "kl_divergence_to_config", "kl_row",
    "Adjacency", "StabilityResult", "adjacency_from_counts",
    "brute_force_partition", "linearised_stability", "optimise_partition",
    "resolution_scan",
    "continental_partition", "jaccard_flows", "nmi", "stability_ratio",
    "variation_of_information",
    "SynthConfig", "generate_panel", "neutral_within_mix",
    "run_pipeline",
]
