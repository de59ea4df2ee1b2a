"""Robustness of fiber-based quantum networks under breakdowns and attacks."""

from .analytics import (
    ComponentDecomposition,
    DegreeHistogram,
    components,
    critical_probability,
    degree_histogram,
    degree_moments,
    power_law_fit,
)
from .capacity import (
    BoundInputs,
    CapacityEstimate,
    WeightedGraph,
    bound_scale_free,
    bound_waxman,
    ensemble_capacity,
    giant_capacity_relation,
    min_cut,
    node_capacity,
    zeta_scale_free,
    zeta_waxman,
)
from .geo_channel import ChannelParams, NodeSite, distance, edge_capacity, transmissivity
from .netgen import (
    GeoGraph,
    ScaleFreeParams,
    WaxmanParams,
    generate_scale_free,
    generate_waxman,
    reparam_waxman_edges,
    reparam_waxman_nodes,
)
from .perturb import (
    ErrorKind,
    Mode,
    Perturbation,
    attack_by_capacity,
    attack_by_degree,
    effective_edge_fraction,
    random_edge_breakdown,
    random_node_breakdown,
)

__version__ = "0.1.0"

__all__ = [
    "attack_by_capacity",
    "attack_by_degree",
    "bound_scale_free",
    "bound_waxman",
    "BoundInputs",
    "CapacityEstimate",
    "ChannelParams",
    "ComponentDecomposition",
    "components",
    "critical_probability",
    "degree_histogram",
    "degree_moments",
    "DegreeHistogram",
    "distance",
    "edge_capacity",
    "effective_edge_fraction",
    "ensemble_capacity",
    "ErrorKind",
    "generate_scale_free",
    "generate_waxman",
    "GeoGraph",
    "giant_capacity_relation",
    "min_cut",
    "Mode",
    "node_capacity",
    "NodeSite",
    "Perturbation",
    "power_law_fit",
    "random_edge_breakdown",
    "random_node_breakdown",
    "reparam_waxman_edges",
    "reparam_waxman_nodes",
    "ScaleFreeParams",
    "transmissivity",
    "WaxmanParams",
    "WeightedGraph",
    "zeta_scale_free",
    "zeta_waxman",
]
