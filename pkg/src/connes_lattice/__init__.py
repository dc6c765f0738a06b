"""Connes' distance function on finite one-dimensional lattices and digraphs."""

__version__ = "0.1.0"

from .distance import (
    UNBOUNDED,
    DistanceQuery,
    DistanceResult,
    Method,
    OracleOptions,
    SolverOptions,
    distance,
    distance_exact_closed,
    distance_exact_open,
    distance_matrix,
    distance_numeric,
    distance_oracle,
    real_reduce,
)
from .graph_metric import (
    WeightedDigraph,
    cycle_graph,
    df_norm,
    graph_distance,
    graph_distance_matrix,
    path_graph,
    shortest_path_oracle,
)
from .numerics import commutator, hermitian_eigenvalues, spectral_norm
from .spectral_triple import (
    DiracKind,
    LatticeSpec,
    SpectralTriple,
    Topology,
    build_adjacency_block,
    build_closed_adjacency_block,
    build_doubled_dirac,
    build_grading,
    build_symmetric_difference,
    build_triple,
    commutator_norm,
    represent,
    validate_triple,
)
