"""Closed-form collaboration probabilities for the clustered D2D cell.

For a user u with cached mass rho_u inside a cluster of k users whose joint
cached mass is rho_c:

* the probability another cluster member holds u's requested file is
  rho_c - rho_u (`p_find`);
* the number of other members requesting something u cached is
  Binomial(k-1, rho_u), giving the serve probability `p_serve`;
* full-duplex collaboration requires both events, half-duplex requires
  serving without finding, and the remainder is the self/fallback mass.

Averaging over the Binomial(n, cluster_ratio) occupancy law yields the
cell-level probabilities.  Because the cache dealer hands each user a random
subset of the cluster's files, rho_u is itself random; a rho-profile
supplies, per occupancy k, the cluster mass together with the per-user mass
mixture induced by the placement policy.
"""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np

from .popularity import ContentLibrary
from .topology import binomial_pmf

# occupancy weights below this are dropped from the outer sum
_PMF_CUTOFF = 1e-18


def p_find(rho_c: float, rho_u: float) -> float:
    """Probability the desired file is cached by another user in the cluster."""
    if rho_u > rho_c:
        raise ValueError("rho_u cannot exceed rho_c")
    if rho_u < 0 or rho_c > 1:
        raise ValueError("rho values must lie in [0, 1]")
    return rho_c - rho_u


def q_serve(x: int, k: int, rho_u: float) -> float:
    """Probability that exactly x of the k-1 other users request cached content.

    Binomial(k-1, rho_u) point mass; identically zero when the cluster holds
    fewer than two users.
    """
    if not 0.0 <= rho_u <= 1.0:
        raise ValueError("rho_u must lie in [0, 1]")
    if k < 2:
        return 0.0
    if not 0 <= x <= k - 1:
        raise ValueError("x out of range for k-1 trials")
    return math.comb(k - 1, x) * rho_u**x * (1.0 - rho_u) ** (k - 1 - x)


def p_serve(k: int, rho_u: float) -> float:
    """Probability of serving at least one other user: sum of q_serve over x>=1."""
    return float(_serve_mass(k, np.asarray([rho_u], dtype=np.float64))[0])


def _serve_mass(k: int, rho: np.ndarray) -> np.ndarray:
    """Vectorized sum_{x=1}^{k-1} Binomial(k-1, rho) pmf, in log space."""
    if np.any(rho < 0) or np.any(rho > 1):
        raise ValueError("rho_u must lie in [0, 1]")
    out = np.zeros_like(rho)
    if k < 2:
        return out
    out[rho == 1.0] = 1.0
    interior = (rho > 0.0) & (rho < 1.0)
    if np.any(interior):
        r = rho[interior]
        x = np.arange(1, k)
        log_fact = np.concatenate(([0.0], np.cumsum(np.log(np.arange(1, k)))))
        log_comb = log_fact[k - 1] - log_fact[x] - log_fact[k - 1 - x]
        terms = np.exp(
            log_comb[None, :]
            + x[None, :] * np.log(r)[:, None]
            + (k - 1 - x)[None, :] * np.log1p(-r)[:, None]
        )
        out[interior] = terms.sum(axis=1)
    return out


def collab_prob_given_k(k: int, rho_c: float, rho_u) -> tuple[float, float]:
    """(HD, FD) collaboration probabilities conditioned on cluster occupancy k.

    rho_u may be a scalar or an array of equally likely per-user masses; the
    result is averaged over them.
    """
    rho = np.atleast_1d(np.asarray(rho_u, dtype=np.float64))
    if np.any(rho > rho_c):
        raise ValueError("rho_u cannot exceed rho_c")
    serve = _serve_mass(k, rho)
    find = rho_c - rho
    return float(np.mean((1.0 - find) * serve)), float(np.mean(find * serve))


def collaboration_probabilities(n: int, cluster_ratio: float, rho_profile):
    """Cell-level (HD, FD, self) probabilities, Binomial-weighted over occupancy.

    rho_profile(k) must return (rho_c, rho_u_values, weights) describing the
    per-user cached-mass mixture for a cluster of k users.  The self mass is
    the exact complement of the other two.
    """
    if not 0.0 < cluster_ratio <= 1.0:
        raise ValueError("cluster_ratio must lie in (0, 1]")
    occupancy = binomial_pmf(n, cluster_ratio)
    hd = 0.0
    fd = 0.0
    for k in range(2, n + 1):
        w = occupancy[k]
        if w < _PMF_CUTOFF:
            continue
        rho_c, rho_us, weights = rho_profile(k)
        rho_us = np.asarray(rho_us, dtype=np.float64)
        weights = np.asarray(weights, dtype=np.float64)
        if np.any(rho_us > rho_c):
            raise ValueError(f"rho profile invalid at k={k}: rho_u > rho_c")
        serve = _serve_mass(k, rho_us)
        find = rho_c - rho_us
        hd += w * float(np.sum(weights * (1.0 - find) * serve))
        fd += w * float(np.sum(weights * find * serve))
    return hd, fd, 1.0 - hd - fd


def p_hd(n: int, cluster_ratio: float, rho_profile) -> float:
    """Probability a user collaborates as a half-duplex transmitter."""
    return collaboration_probabilities(n, cluster_ratio, rho_profile)[0]


def p_fd(n: int, cluster_ratio: float, rho_profile) -> float:
    """Probability a user collaborates in full-duplex mode."""
    return collaboration_probabilities(n, cluster_ratio, rho_profile)[1]


def p_self(n: int, cluster_ratio: float, rho_profile) -> float:
    """Complement mass: no collaboration (self-hits and unserved users)."""
    return collaboration_probabilities(n, cluster_ratio, rho_profile)[2]


def placement_rho_profile(
    library: ContentLibrary,
    h: int,
    max_enumerate: int = 20000,
    hand_samples: int = 2000,
    seed: int = 0,
):
    """Rho profile induced by the disjoint most-popular-first placement.

    A cluster of k users caches the top k*h ranks, dealt uniformly at random;
    marginally each user holds a uniform h-subset of those ranks.  The
    mixture is exact (full enumeration) while C(k*h, h) <= max_enumerate,
    otherwise it averages over `hand_samples` pseudo-random hands drawn from
    a fixed seed, so repeated evaluations are identical.
    """
    if h < 1:
        raise ValueError("h must be >= 1")
    pmf = library.pmf
    cum = np.concatenate(([0.0], np.cumsum(pmf)))

    def profile(k: int):
        if k == 0:
            return 0.0, np.empty(0), np.empty(0)
        top = k * h
        if top > library.m:
            raise ValueError(
                f"placement infeasible at occupancy k={k}: {top} > m={library.m}"
            )
        rho_c = float(cum[top])
        if h == 1:
            values = pmf[:k].astype(np.float64)
        elif math.comb(top, h) <= max_enumerate:
            values = np.fromiter(
                (pmf[list(c)].sum() for c in combinations(range(top), h)),
                dtype=np.float64,
                count=math.comb(top, h),
            )
        else:
            rng = np.random.default_rng(np.random.SeedSequence([seed, k, h]))
            picks = np.argsort(rng.random((hand_samples, top)), axis=1)[:, :h]
            values = pmf[picks].sum(axis=1)
        weights = np.full(values.size, 1.0 / values.size)
        return rho_c, values, weights

    return profile


def scalar_rho_profile(rho_c_of_k, rho_u_of_k):
    """Profile from plain functions k -> rho_c and k -> rho_u (single mass)."""

    def profile(k: int):
        rho_c = float(rho_c_of_k(k))
        rho_u = float(rho_u_of_k(k))
        return rho_c, np.asarray([rho_u]), np.asarray([1.0])

    return profile
