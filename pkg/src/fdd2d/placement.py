"""Cache placement with per-cluster disjoint caches and popularity masses.

Within each cluster of k users the k*h most popular files are stored, h per
user, so caches never overlap inside a cluster (the most-popular-first
policy).  Which user holds which files is uniformly random.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .popularity import ContentLibrary
from .topology import CellDeployment


class InfeasiblePlacementError(RuntimeError):
    """A cluster holds more users than the library can supply disjoint caches for."""

    def __init__(self, cluster_id: int, k: int, h: int, m: int):
        self.cluster_id = cluster_id
        super().__init__(
            f"cluster {cluster_id}: {k} users x {h} cached files "
            f"exceeds library size {m}"
        )


@dataclass(frozen=True)
class CacheAssignment:
    """Per-user cache contents (file ranks, one row per user) and masses."""

    h: int
    cache_matrix: np.ndarray = field(repr=False)  # (n, h) file ranks, row-sorted
    rho_u: np.ndarray = field(repr=False)         # user id -> cached popularity mass
    rho_c: np.ndarray = field(repr=False)         # cluster id -> summed user masses

    def files_of(self, user: int) -> np.ndarray:
        return self.cache_matrix[user]

    def owner_maps(self, cluster_of: np.ndarray, n_clusters: int) -> list:
        """Per-cluster dict mapping a cached file rank to its unique owner."""
        owners = [dict() for _ in range(n_clusters)]
        for user in range(len(self.cache_matrix)):
            table = owners[cluster_of[user]]
            for f in self.cache_matrix[user]:
                table[int(f)] = user
        return owners


def rho_user(cache, library: ContentLibrary) -> float:
    """Popularity mass of one cache: sum of the library pmf over its file ranks."""
    return library.popularity_mass(cache)


def place_caches(
    deployment: CellDeployment,
    library: ContentLibrary,
    h: int,
    rng: np.random.Generator,
) -> CacheAssignment:
    """Fill every user's cache with h files under the per-cluster disjoint policy.

    Raises InfeasiblePlacementError when some cluster needs more than m files.
    """
    if h < 1:
        raise ValueError("h must be >= 1")
    if deployment.cluster_of is None:
        raise ValueError("deployment has no cluster assignment")
    n = deployment.n
    n_clusters = deployment.n_clusters
    cache_matrix = np.zeros((n, h), dtype=np.int64)
    rho_u = np.zeros(n)
    rho_c = np.zeros(n_clusters)
    order = np.argsort(deployment.cluster_of, kind="stable")
    counts = np.bincount(deployment.cluster_of, minlength=n_clusters)
    start = 0
    for cid in np.flatnonzero(counts):
        k = int(counts[cid])
        members = order[start:start + k]
        start += k
        if k * h > library.m:
            raise InfeasiblePlacementError(int(cid), k, h, library.m)
        hands = rng.permutation(np.arange(1, k * h + 1)).reshape(k, h)
        hands.sort(axis=1)
        cache_matrix[members] = hands
        masses = library.pmf[hands - 1].sum(axis=1)
        rho_u[members] = masses
        rho_c[cid] = masses.sum()
    return CacheAssignment(h=h, cache_matrix=cache_matrix, rho_u=rho_u, rho_c=rho_c)
