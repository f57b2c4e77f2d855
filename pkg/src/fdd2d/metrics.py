"""Per-node throughput and download-time accounting, FD vs HD.

Throughput of an established node is the sum of its outgoing ergodic
capacities, plus the incoming-link capacity when the node receives in
full-duplex.  Download time around a node combines the time of its own
incoming transfer (theta_in) with the slowest of its outgoing transfers
(omega): half-duplex serializes the two, full-duplex overlaps them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class NodeThroughput:
    """Expected throughput contribution of one established node."""

    mode: str              # "HD" or "FD"
    collab_prob: float
    capacity: float        # bits/s
    throughput: float      # bits/s

    def __post_init__(self):
        if not 0.0 <= self.collab_prob <= 1.0:
            raise ValueError("collab_prob must lie in [0, 1]")
        if self.capacity < 0 or self.throughput < 0:
            raise ValueError("capacity and throughput must be non-negative")
        if self.throughput > self.capacity * (1 + 1e-12):
            raise ValueError("throughput cannot exceed capacity")


@dataclass(frozen=True)
class DownloadReport:
    """Download times around one established node, both duplexing variants."""

    scenario: str          # "TNFD" or "BFD"
    theta_in: float        # s, the node's own incoming transfer
    omega: float           # s, slowest outgoing transfer
    d_hd: float
    d_fd: float


def node_capacity(out_capacities, in_capacity: float | None = None) -> float:
    """Capacity of an established node: HD sums out-links, FD adds its in-link.

    in_capacity=None means half-duplex.  A full-duplex node with no outgoing
    links violates the mode classification and is rejected.
    """
    outs = list(out_capacities)
    if any(c < 0 for c in outs):
        raise ValueError("capacities must be non-negative")
    if in_capacity is None:
        return float(sum(outs))
    if not outs:
        raise ValueError("an FD node must have at least one outgoing link")
    if in_capacity < 0:
        raise ValueError("capacities must be non-negative")
    return float(in_capacity + sum(outs))


def node_throughput(prob: float, capacity: float) -> float:
    """Expected node throughput: collaboration probability times capacity."""
    if not 0.0 <= prob <= 1.0:
        raise ValueError("prob must lie in [0, 1]")
    if capacity < 0:
        raise ValueError("capacity must be non-negative")
    return prob * capacity


def cluster_sum_throughput(per_node_throughput) -> float:
    """Sum throughput of one cluster's established nodes (empty set gives 0)."""
    total = 0.0
    for t in per_node_throughput:
        if t < 0:
            raise ValueError("throughput must be non-negative")
        total += t
    return total


def _check_thetas(*thetas):
    for t in thetas:
        if not (t > 0 and math.isfinite(t)):
            raise ValueError("download times must be positive and finite")


def download_times_tnfd(theta_in: float, served_thetas) -> tuple[float, float]:
    """(D_HD, D_FD) for a node receiving one file while serving a set of users.

    omega is the slowest outgoing transfer; HD serializes reception and
    transmission, FD overlaps them.
    """
    served = list(served_thetas)
    if not served:
        raise ValueError("served set must be nonempty")
    _check_thetas(theta_in, *served)
    omega = max(served)
    return theta_in + omega, max(theta_in, omega)


def download_times_bfd(theta_j_to_i: float, theta_i_to_j: float) -> tuple[float, float]:
    """(D_HD, D_FD) for two users exchanging their files with each other."""
    _check_thetas(theta_j_to_i, theta_i_to_j)
    return theta_j_to_i + theta_i_to_j, max(theta_j_to_i, theta_i_to_j)
