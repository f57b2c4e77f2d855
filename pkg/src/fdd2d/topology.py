"""Cell geometry: uniform user drops, square clustering, occupancy law.

The cell is a square of area 2*a^2 (side a*sqrt(2)), so a cluster of side l
covers exactly the fraction l^2/(2 a^2) of the cell and the number of users
inside one full cluster is Binomial(n, l^2/(2 a^2)).  The cluster grid is
anchored at the lower-left corner; when the cell side is not a multiple of l
the right/top edge clusters are truncated rectangles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

_EDGE_EPS = 1e-9


@dataclass(frozen=True)
class CellDeployment:
    """User positions in the square cell, optionally partitioned into clusters.

    Positions are in km.  Cluster fields are populated by assign_clusters;
    cluster ids enumerate the grid row-major (id = col + row * n_cols).
    """

    n: int
    a: float
    positions: np.ndarray = field(repr=False)
    l: float | None = None
    cluster_of: np.ndarray | None = field(default=None, repr=False)
    n_cols: int = 0
    n_full_cols: int = 0

    @property
    def side(self) -> float:
        return self.a * math.sqrt(2.0)

    @property
    def cluster_ratio(self) -> float:
        if self.l is None:
            raise ValueError("clusters not assigned")
        return self.l * self.l / (2.0 * self.a * self.a)

    @property
    def n_clusters(self) -> int:
        if self.l is None:
            raise ValueError("clusters not assigned")
        return self.n_cols * self.n_cols

    def full_cluster_mask(self) -> np.ndarray:
        """Boolean mask over cluster ids: True for untruncated l-by-l clusters.

        Truncated edge clusters cover less area than l^2, so only full
        clusters follow the Binomial(n, l^2/(2 a^2)) occupancy law.
        """
        ids = np.arange(self.n_clusters)
        cols = ids % self.n_cols
        rows = ids // self.n_cols
        return (cols < self.n_full_cols) & (rows < self.n_full_cols)

    def occupancy_counts(self) -> np.ndarray:
        """Users per cluster, indexed by cluster id."""
        if self.cluster_of is None:
            raise ValueError("clusters not assigned")
        return np.bincount(self.cluster_of, minlength=self.n_clusters)


def place_users(n: int, a: float, rng: np.random.Generator) -> CellDeployment:
    """Drop n users i.i.d. uniform over the square cell of area 2*a^2."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if a <= 0:
        raise ValueError("a must be > 0")
    side = a * math.sqrt(2.0)
    positions = rng.uniform(0.0, side, size=(n, 2))
    return CellDeployment(n=n, a=a, positions=positions)


def assign_clusters(deployment: CellDeployment, l: float) -> CellDeployment:
    """Partition the cell into square clusters of side l and map users to them."""
    side = deployment.side
    if l <= 0:
        raise ValueError("cluster side l must be > 0")
    if l > side * (1.0 + _EDGE_EPS):
        raise ValueError("cluster side l must not exceed the cell side")
    n_cols = max(1, math.ceil(side / l - _EDGE_EPS))
    n_full_cols = max(1, math.floor(side / l + _EDGE_EPS))
    cols = np.minimum((deployment.positions[:, 0] // l).astype(np.int64), n_cols - 1)
    rows = np.minimum((deployment.positions[:, 1] // l).astype(np.int64), n_cols - 1)
    return replace(deployment, l=l, cluster_of=cols + rows * n_cols,
                   n_cols=n_cols, n_full_cols=n_full_cols)


def occupancy_pmf(n: int, l: float, a: float) -> np.ndarray:
    """Binomial pmf of the number of users inside one full cluster.

    Pr[K=k] = C(n,k) p^k (1-p)^(n-k) with p = l^2/(2 a^2), for k = 0..n.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if l <= 0 or a <= 0:
        raise ValueError("l and a must be > 0")
    p = l * l / (2.0 * a * a)
    if p > 1.0 + _EDGE_EPS:
        raise ValueError("cluster-to-cell area ratio exceeds 1")
    return binomial_pmf(n, min(p, 1.0))


def binomial_pmf(n: int, p: float) -> np.ndarray:
    """Full Binomial(n, p) pmf over 0..n, computed in log space for stability."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    k = np.arange(n + 1)
    if p == 0.0:
        out = np.zeros(n + 1)
        out[0] = 1.0
        return out
    if p == 1.0:
        out = np.zeros(n + 1)
        out[n] = 1.0
        return out
    log_fact = np.concatenate(([0.0], np.cumsum(np.log(np.arange(1, n + 1)))))
    log_pmf = (log_fact[n] - log_fact[k] - log_fact[n - k]
               + k * math.log(p) + (n - k) * math.log1p(-p))
    return np.exp(log_pmf)
