"""Randomized (1+eps)-approximation for minimum-weight 2-edge-connected
spanning subgraphs in metrics of bounded doubling dimension, with exact
oracles and property verifiers at desk scale."""

from .metric import (
    Ball,
    MetricError,
    MetricInstance,
    MetricStats,
    ball_members,
    build_net,
    estimate_doubling_dimension,
    metric_stats,
    verify_net,
)
from .graphs import (
    SubgraphSolution,
    certify_2ecss,
    find_bridges,
    minimum_spanning_tree,
    mst_weight,
    shortcut_euler_tour,
    solution_from_edges,
)
from .oracles import OracleResult, brute_force_2ecss, double_mst_baseline, held_karp_tsp
from .hierarchy import (
    Cluster,
    ClusterTree,
    PartitionParams,
    assign_portals,
    build_cluster_tree,
    cut_probability_table,
    estimate_cut_probability,
    validate_cluster_tree,
)
from .sparsity import SparsityParams, SparsityReport, decompose_sparse_dense, find_sparsity_violation
from .transforms import make_well_behaved, patch_crossings, well_behaved_violations
from .dp import NoFeasibleConfiguration, SolverParams, enumerate_configs, solve_sparse_dp
from .solver import RunReport, repair_to_2ecss, solve_2ecss
from .generators import GeneratorSpec, generate_instance

__all__ = [
    "Ball",
    "MetricError",
    "MetricInstance",
    "MetricStats",
    "ball_members",
    "build_net",
    "estimate_doubling_dimension",
    "metric_stats",
    "verify_net",
    "SubgraphSolution",
    "certify_2ecss",
    "find_bridges",
    "minimum_spanning_tree",
    "mst_weight",
    "shortcut_euler_tour",
    "solution_from_edges",
    "OracleResult",
    "brute_force_2ecss",
    "double_mst_baseline",
    "held_karp_tsp",
    "Cluster",
    "ClusterTree",
    "PartitionParams",
    "assign_portals",
    "build_cluster_tree",
    "cut_probability_table",
    "estimate_cut_probability",
    "validate_cluster_tree",
    "SparsityParams",
    "SparsityReport",
    "decompose_sparse_dense",
    "find_sparsity_violation",
    "make_well_behaved",
    "patch_crossings",
    "well_behaved_violations",
    "NoFeasibleConfiguration",
    "SolverParams",
    "enumerate_configs",
    "solve_sparse_dp",
    "RunReport",
    "repair_to_2ecss",
    "solve_2ecss",
    "GeneratorSpec",
    "generate_instance",
]

__version__ = "0.1.0"
