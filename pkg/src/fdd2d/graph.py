"""Directed request graph inside clusters, node modes, transmitter establishment.

An edge u_i -> u_j exists when u_j's requested file sits in u_i's cache,
both users share a cluster, their distance is below the protocol threshold l,
and u_j did not cache the file itself.  Disjoint caches make the server for
any cached file unique, so every node has at most one incoming edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from .placement import CacheAssignment
from .topology import CellDeployment

NO_SERVER = -1


class Mode(IntEnum):
    """Node mode from the request-graph structure.

    Precedence follows transmit/receive activity: a node that serves others
    while its own request is self-cached operates as an HD transmitter, so
    SELF only tags nodes with no edges at all.
    """

    IDLE = 0
    SELF = 1
    HD_TX = 2
    FD_BFD = 3
    FD_TNFD = 4
    RX_ONLY = 5


FD_MODES = (Mode.FD_BFD, Mode.FD_TNFD)


@dataclass(frozen=True)
class RequestGraph:
    """Edge structure of one drop: in-server, out-neighbour lists, self flags."""

    n: int
    cluster_of: np.ndarray = field(repr=False)
    n_clusters: int = 0
    requests: np.ndarray = field(default=None, repr=False)   # user -> file rank
    server_of: np.ndarray = field(default=None, repr=False)  # user -> server id or NO_SERVER
    out_of: list = field(default=None, repr=False)           # user -> list of receiver ids
    self_request: np.ndarray = field(default=None, repr=False)

    def edges(self):
        """Iterate (cluster_id, src, dst, file_id) over all edges."""
        for dst in range(self.n):
            src = int(self.server_of[dst])
            if src != NO_SERVER:
                yield (int(self.cluster_of[dst]), src, dst, int(self.requests[dst]))

    def n_edges(self) -> int:
        return int(np.sum(self.server_of != NO_SERVER))


def build_request_graph(
    deployment: CellDeployment,
    caches: CacheAssignment,
    requests: np.ndarray,
    l: float,
) -> RequestGraph:
    """Construct the per-cluster request graph under the protocol model."""
    if deployment.cluster_of is None:
        raise ValueError("deployment has no cluster assignment")
    n = deployment.n
    requests = np.asarray(requests, dtype=np.int64)
    server_of = np.full(n, NO_SERVER, dtype=np.int64)
    out_of = [[] for _ in range(n)]
    if n > 0:
        cluster_of = deployment.cluster_of
        h = caches.h
        stride = int(max(caches.cache_matrix.max(initial=0), requests.max(initial=0))) + 1
        self_request = (caches.cache_matrix == requests[:, None]).any(axis=1)
        # locate the in-cluster owner of each request with one sorted lookup;
        # keys are unique because caches are disjoint within a cluster
        keys = cluster_of.repeat(h).astype(np.int64) * stride + caches.cache_matrix.ravel()
        order = np.argsort(keys)
        sorted_keys = keys[order]
        sorted_owner = np.repeat(np.arange(n), h)[order]
        want = cluster_of * stride + requests
        pos = np.searchsorted(sorted_keys, want)
        pos_ok = pos < len(sorted_keys)
        found = np.zeros(n, dtype=bool)
        found[pos_ok] = sorted_keys[pos[pos_ok]] == want[pos_ok]
        found &= ~self_request
        owner = np.where(found, sorted_owner[np.minimum(pos, len(sorted_keys) - 1)], 0)
        delta = deployment.positions[owner] - deployment.positions
        near = (delta * delta).sum(axis=1) < l * l
        served = found & near
        server_of[served] = owner[served]
        for dst in np.flatnonzero(served):
            out_of[server_of[dst]].append(int(dst))
    else:
        self_request = np.zeros(0, dtype=bool)
    return RequestGraph(
        n=n,
        cluster_of=deployment.cluster_of,
        n_clusters=deployment.n_clusters,
        requests=requests,
        server_of=server_of,
        out_of=out_of,
        self_request=self_request,
    )


def classify_modes(graph: RequestGraph) -> np.ndarray:
    """Tag every node with exactly one Mode.

    FD tags require at least one incoming and one outgoing edge: BFD when the
    serving node is also one of the node's receivers (mutual exchange), TNFD
    otherwise.  Transmit-only nodes are HD_TX regardless of whether their own
    request was a self-hit.
    """
    n = graph.n
    modes = np.full(n, int(Mode.IDLE), dtype=np.int64)
    if n == 0:
        return modes
    s = graph.server_of
    has_in = s != NO_SERVER
    out_deg = np.bincount(s[has_in], minlength=n)
    has_out = out_deg > 0
    # the edge u -> server(u) exists exactly when server(server(u)) == u
    mutual = np.zeros(n, dtype=bool)
    inbound = np.flatnonzero(has_in)
    mutual[inbound] = s[s[inbound]] == inbound
    modes[~has_in & has_out] = Mode.HD_TX
    modes[has_in & ~has_out] = Mode.RX_ONLY
    modes[has_in & has_out & mutual] = Mode.FD_BFD
    modes[has_in & has_out & ~mutual] = Mode.FD_TNFD
    modes[~has_in & ~has_out & graph.self_request] = Mode.SELF
    return modes


def establish_nodes(graph: RequestGraph, caches: CacheAssignment, tau: int) -> dict:
    """Per cluster, pick up to tau transmitters among nodes with outgoing edges.

    Ranking is by cached popularity mass rho_u descending, ties broken by the
    lower user id.  Returns {cluster_id: tuple of established user ids};
    clusters without transmit candidates are absent.
    """
    if tau < 1:
        raise ValueError("tau must be >= 1")
    candidates = {}
    for user in range(graph.n):
        if graph.out_of[user]:
            candidates.setdefault(int(graph.cluster_of[user]), []).append(user)
    psi = {}
    for cid, users in candidates.items():
        users.sort(key=lambda u: (-caches.rho_u[u], u))
        psi[cid] = tuple(users[:tau])
    return psi


def format_edge_list(graph: RequestGraph) -> str:
    """Debug export: one `cluster_id src dst file_id` row per edge."""
    rows = sorted(graph.edges())
    return "\n".join(" ".join(str(c) for c in row) for row in rows)
