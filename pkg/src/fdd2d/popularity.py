"""Zipf popularity model for the video library and random request sampling."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

BITS_PER_MB = 8_000_000


@dataclass(frozen=True)
class ContentLibrary:
    """Video library: Zipf popularity over ranks plus per-file sizes in bits.

    File identifiers are popularity ranks, 1-based: file 1 is the most
    popular.  ``pmf[s-1]`` is the request probability of file ``s`` and
    ``sizes_bits[s-1]`` its size.
    """

    m: int
    gamma_r: float
    pmf: np.ndarray = field(repr=False)
    sizes_bits: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("library must contain at least one file")
        if len(self.pmf) != self.m or len(self.sizes_bits) != self.m:
            raise ValueError("pmf/sizes length must equal m")
        if np.any(self.pmf <= 0) or np.any(np.diff(self.pmf) > 0):
            raise ValueError("pmf must be strictly positive and non-increasing")
        if abs(float(self.pmf.sum()) - 1.0) > 1e-12:
            raise ValueError("pmf must sum to 1")
        if np.any(self.sizes_bits <= 0):
            raise ValueError("file sizes must be strictly positive")

    def popularity_mass(self, files) -> float:
        """Total request probability of a set of file ranks (1-based)."""
        idx = np.asarray(list(files), dtype=np.int64)
        if idx.size == 0:
            return 0.0
        if np.any(idx < 1) or np.any(idx > self.m):
            raise ValueError("file rank out of range")
        return float(self.pmf[idx - 1].sum())


def zipf_pmf(m: int, gamma_r: float) -> np.ndarray:
    """Zipf probability vector over ranks 1..m: f_s = s^-gamma / sum_g g^-gamma."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if gamma_r < 0:
        raise ValueError("gamma_r must be >= 0")
    ranks = np.arange(1, m + 1, dtype=np.float64)
    weights = np.power(ranks, -float(gamma_r))
    return weights / weights.sum()


def build_library(
    m: int,
    gamma_r: float,
    rng: np.random.Generator,
    size_min_mb: float = 5.0,
    size_max_mb: float = 50.0,
) -> ContentLibrary:
    """Create a library with Zipf popularity and uniform random file sizes.

    Sizes are drawn once per library in [size_min_mb, size_max_mb] MB and
    converted to bits at 8e6 bits/MB.  Size is independent of rank.
    """
    if size_min_mb <= 0 or size_max_mb < size_min_mb:
        raise ValueError("size range must satisfy 0 < min <= max")
    pmf = zipf_pmf(m, gamma_r)
    sizes_mb = rng.uniform(size_min_mb, size_max_mb, size=m)
    return ContentLibrary(m=m, gamma_r=gamma_r, pmf=pmf,
                          sizes_bits=sizes_mb * BITS_PER_MB)


def sample_request(library: ContentLibrary, rng: np.random.Generator) -> int:
    """Draw one requested file rank (1-based) from the library popularity."""
    return int(rng.choice(library.m, p=library.pmf)) + 1


def sample_requests(library: ContentLibrary, size: int,
                    rng: np.random.Generator) -> np.ndarray:
    """Vector of `size` i.i.d. requested file ranks (1-based)."""
    return rng.choice(library.m, size=size, p=library.pmf).astype(np.int64) + 1
