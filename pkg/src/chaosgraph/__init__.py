"""Spectral and combinatorial diagnostics for central limit theorems of homogeneous sums."""

__version__ = "0.1.0"

from .errors import ChaosGraphError, NumericalError, ValidationError
from .graphs import (
    Graph,
    Partition,
    adjacency_spectrum,
    build_graph,
    cartesian_product,
    cheeger_check,
    edge_count,
    edge_expansion,
    normalized_laplacian_spectrum,
    partition_spectral_bound,
    phi2_tilde,
    phi_k,
    product_power,
    volume,
)
from .hypergraphs import (
    WeightedHypergraph,
    build_hypergraph,
    homsum_to_hypergraph,
    hyper_adjacency,
    hyper_adjacency_spectrum,
    hyper_boundary,
    hyper_cheeger_check,
    hyper_edge_expansion,
    hyper_laplacian_spectrum,
    hyper_partition_bound,
    hyper_phi_k,
    hyper_volume,
    hypergraph_variance,
)
from .homsum import (
    CLTReport,
    HomogeneousSum,
    build_homsum,
    clt_report,
    contraction_norms,
    empirical_moments,
    fourth_moment_d2_exact,
    fourth_moment_wick,
    from_graph,
    from_ordered,
    ks_statistic,
    sample,
    spectral_criteria_d2,
    variance,
)
from .support import Support
from .constructions import (
    FractionalPartition,
    GridLayout,
    complete,
    complete_bipartite,
    enumerate_fractional_partitions,
    fractional_product,
    grid_family,
    hypercube,
    random_support,
    rook,
    rook_variant,
    rook_variant_directed,
    rooklike_hypergraph,
    triangle_hypergraph,
    union_with_isolated,
)
from .reducibility import (
    component_split,
    evaluate_partition,
    family_trend,
    grid_bound_check,
    grid_candidates,
    hypercube_boxes,
    partial_reduction_eval,
    random_balanced_partition,
    restricted_sum_gap,
    row_boxes,
    column_boxes,
    block_grid_boxes,
    component_boxes,
    sigma2,
    spectral_certificate,
)
from .combdim import combdim_family_report, fit_alpha, max_degree_check, rect_ratio_sup, rectangle_count
