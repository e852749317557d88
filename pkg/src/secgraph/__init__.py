"""Secrecy graphs of Poisson point processes: sampling, analytics and percolation."""
__version__ = "0.1.0"

from .analytics import CONSTANTS, QUANTITIES
from .graph import (
    DEGREE_KINDS,
    SecrecyGraph,
    build_directed,
    degree_summary,
    derive_edge_sets,
    edge_lengths,
    out_component,
    sample_graph,
    undirected_components,
)
from .lattice import build_lattice_graph, crosses, crossing_threshold, estimate_pc, gen_config
from .percolation import (
    PercRunParams,
    critical_graph_stats,
    estimate_lambda_c,
    estimate_lambda_inf,
    estimate_r_c,
    estimate_theta,
    percolates,
    sweep,
)
from .pointprocess import ParameterError, PointSet, SeedSpec, Window, guard_radii, sample_ppp
from .thresholds import BracketError, ThresholdEstimate

__all__ = [
    "CONSTANTS", "QUANTITIES", "DEGREE_KINDS", "SecrecyGraph", "build_directed", "degree_summary",
    "derive_edge_sets", "edge_lengths", "out_component", "sample_graph", "undirected_components",
    "build_lattice_graph", "crosses", "crossing_threshold", "estimate_pc", "gen_config",
    "PercRunParams", "critical_graph_stats", "estimate_lambda_c", "estimate_lambda_inf", "estimate_r_c",
    "estimate_theta", "percolates", "sweep", "ParameterError", "PointSet", "SeedSpec", "Window",
    "guard_radii", "sample_ppp", "BracketError", "ThresholdEstimate",
]
