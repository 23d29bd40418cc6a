"""Simultaneous coherent structure coloring (sCSC).

Turns a pairwise-dissimilarity matrix into a binary-coded dendrogram of
coherent clusters via a generalized eigenvalue problem, and ships analytic
flow simulators (quadruple-eddy, Bickley jet) so the clustering can be run
end-to-end on reproducible Lagrangian trajectory data.
"""

from scsc.ensemble import TrajectoryEnsemble, TransitionMatrix
from scsc.adjacency import (
    AdjacencyMatrix,
    build_trajectory_adjacency,
    build_transition_adjacency,
    js_divergence,
    js_metric,
    trajectory_dissimilarity,
    validate_adjacency,
)
from scsc.spectral import SpectralBasis, degree_vector, graph_laplacian, solve_generalized, z_value
from scsc.tree import ColoringTree, TreeNode, assign_codes, bifurcate_coordinate, build_tree, dendrogram_geometry
from scsc.flows import (
    BickleyParams,
    FlowSpec,
    QuadEddyParams,
    advect,
    bickley_streamfunction,
    bickley_velocity,
    noise_ensemble,
    quad_eddy_velocity,
    seed_uniform,
)

__version__ = "0.1.0"

__all__ = [
    "AdjacencyMatrix",
    "BickleyParams",
    "ColoringTree",
    "FlowSpec",
    "QuadEddyParams",
    "SpectralBasis",
    "TrajectoryEnsemble",
    "TransitionMatrix",
    "TreeNode",
    "advect",
    "assign_codes",
    "bickley_streamfunction",
    "bickley_velocity",
    "bifurcate_coordinate",
    "build_trajectory_adjacency",
    "build_transition_adjacency",
    "build_tree",
    "degree_vector",
    "dendrogram_geometry",
    "graph_laplacian",
    "js_divergence",
    "js_metric",
    "noise_ensemble",
    "quad_eddy_velocity",
    "seed_uniform",
    "solve_generalized",
    "trajectory_dissimilarity",
    "validate_adjacency",
    "z_value",
]
