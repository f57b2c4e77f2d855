"""FD-D2D video delivery over a clustered cell: simulation and closed forms."""

from .analytic import (
    collab_prob_given_k,
    collaboration_probabilities,
    p_fd,
    p_find,
    p_hd,
    p_self,
    p_serve,
    placement_rho_profile,
    q_serve,
)
from .channel import ActiveLinkSet, ChannelEnv, ergodic_capacity, sinr
from .config import ConfigError, ScenarioConfig
from .graph import Mode, RequestGraph, build_request_graph, classify_modes, establish_nodes
from .harness import run_drop, run_scenario
from .metrics import (
    cluster_sum_throughput,
    download_times_bfd,
    download_times_tnfd,
    node_capacity,
    node_throughput,
)
from .placement import CacheAssignment, InfeasiblePlacementError, place_caches, rho_user
from .popularity import ContentLibrary, build_library, sample_request, zipf_pmf
from .results import ResultTable, read_results, write_results
from .topology import CellDeployment, assign_clusters, occupancy_pmf, place_users

__version__ = "0.1.0"
