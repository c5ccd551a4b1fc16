"""Packet routing on scale-free networks: protocols, congestion
thresholds, and exact topological bottleneck bounds."""

__version__ = "0.1.0"

from .graph import (
    DegreeDistribution,
    Graph,
    build_configuration_model,
    largest_component,
    load_edge_list,
    sample_degree_sequence,
    save_edge_list,
    structural_cutoff,
)
from .routing import (
    BetweennessReport,
    RouteTable,
    hub_avoidance_routes,
    predict_gamma_c,
    route_betweenness,
    shortest_path_routes,
    streaming_betweenness,
)
from .dynamics import (
    Packet,
    SimState,
    ThetaEstimate,
    find_threshold,
    run_simulation,
    step,
)
from .bounds import (
    ExpansionResult,
    SeparatorResult,
    b_e_exponent,
    edge_expansion,
    min_sparsity_separator,
    verify_topological_bound,
)
from .harness import (
    ExperimentConfig,
    FitResult,
    fit_exponent,
    make_graph,
    scaling_study,
    scan_gamma,
)
