"""Exemplar clustering via potential-field in-trees and sparse affinity propagation.

The pipeline takes nothing but pairwise dissimilarities: a Gaussian
potential field orders the nodes, each node links to its nearest
lower-potential neighbor (the in-tree), the tree expands into a belief
graph connecting each node to all its ancestors with path-length weights,
and sparse affinity propagation over that graph picks the exemplars.
Dense affinity propagation and edge-cutting baselines are included for
comparison.
"""

from .backend import active_backend_name, available_backends, set_backend
from .belief import BeliefGraph, build_belief_graph
from .data import (
    Dataset,
    DistanceMatrix,
    GapParams,
    compute_distance_matrix,
    load_csv,
    load_mushroom,
)
from .engine import (
    ApState,
    GapResult,
    SimilarityModel,
    build_similarity_model,
    dense_ap,
    extract_exemplars,
    gap_cluster,
    net_similarity,
    sparse_ap,
)
from .errors import (
    ConvergenceWarning,
    GapClustError,
    InputError,
    ParameterError,
    ParseError,
)
from .intree import (
    InTree,
    build_in_tree,
    decision_graph,
    k_cut,
    k_dcc_cut,
)
from .potential import PotentialField, compute_potentials
from .result import (
    Clustering,
    error_rate,
    export_exemplar_graph,
    partition_agreement,
)

__version__ = "0.1.0"

__all__ = [
    "ApState",
    "BeliefGraph",
    "Clustering",
    "ConvergenceWarning",
    "Dataset",
    "DistanceMatrix",
    "GapClustError",
    "GapParams",
    "GapResult",
    "InTree",
    "InputError",
    "ParameterError",
    "ParseError",
    "PotentialField",
    "SimilarityModel",
    "active_backend_name",
    "available_backends",
    "build_belief_graph",
    "build_in_tree",
    "build_similarity_model",
    "compute_distance_matrix",
    "compute_potentials",
    "decision_graph",
    "dense_ap",
    "error_rate",
    "export_exemplar_graph",
    "extract_exemplars",
    "gap_cluster",
    "k_cut",
    "k_dcc_cut",
    "load_csv",
    "load_mushroom",
    "net_similarity",
    "partition_agreement",
    "set_backend",
    "sparse_ap",
    "__version__",
]
