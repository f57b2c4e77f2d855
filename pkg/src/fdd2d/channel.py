"""Link-level SINR with residual self-interference and ergodic capacity.

Every concurrent transmitter interferes at every receiver; a receiver that
is itself transmitting additionally sees the residual self-interference
beta * Pt.  Path gain is d^-alpha on the raw km geometry (no reference-loss
constant), multiplied by unit-mean Rayleigh fading power and unit-mean
log-normal shadowing per transmitter-receiver pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

LN10_OVER_10 = math.log(10.0) / 10.0


class DegenerateGeometryError(ValueError):
    """A transmitter and a receiver sit at the exact same position."""


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def noise_power_w(noise_dbm_hz: float, bandwidth_hz: float) -> float:
    """Thermal noise power over the band, from spectral density in dBm/Hz."""
    return dbm_to_watts(noise_dbm_hz) * bandwidth_hz


@dataclass(frozen=True)
class ChannelEnv:
    """Radio parameters shared by all links."""

    pt_w: float
    sigma2_w: float
    alpha: float
    beta: float
    shadow_sigma_db: float = 0.0
    bandwidth_hz: float = 1.0
    rayleigh: bool = True  # False freezes fading at h=1 (deterministic channel)

    def __post_init__(self):
        if self.pt_w <= 0 or self.sigma2_w <= 0 or self.bandwidth_hz <= 0:
            raise ValueError("powers and bandwidth must be positive")
        if self.alpha < 2:
            raise ValueError("path-loss exponent must be >= 2")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("residual SI ratio beta must lie in [0, 1]")
        if self.shadow_sigma_db < 0:
            raise ValueError("shadowing spread must be >= 0")


@dataclass(frozen=True)
class ActiveLinkSet:
    """Concurrent transmitters and the directed links they serve.

    tx_positions holds each transmitter once; link i is tx_positions[link_tx[i]]
    -> rx_positions[i].  rx_transmitting flags receivers that transmit
    concurrently (full-duplex operation): they take the residual
    self-interference term, and rx_tx_index names their own column in the
    transmitter set so the pathloss sum skips it (own leakage is the beta*Pt
    term, not a d^-alpha interferer).  rx_tx_index is -1 for receivers that
    are not in the transmitter set.
    """

    tx_positions: np.ndarray = field(repr=False)   # (T, 2) km
    link_tx: np.ndarray = field(repr=False)        # (L,) int
    rx_positions: np.ndarray = field(repr=False)   # (L, 2) km
    rx_transmitting: np.ndarray = field(repr=False)  # (L,) bool
    rx_tx_index: np.ndarray | None = field(default=None, repr=False)  # (L,) int

    @property
    def n_links(self) -> int:
        return len(self.link_tx)

    @property
    def n_tx(self) -> int:
        return len(self.tx_positions)

    def gain_matrix(self, env: ChannelEnv) -> np.ndarray:
        """Pt * d^-alpha from every transmitter to every link receiver, (L, T).

        Entries pairing a transmitting receiver with its own column are zero.
        """
        delta = self.rx_positions[:, None, :] - self.tx_positions[None, :, :]
        d = np.sqrt(np.sum(delta * delta, axis=2))
        own = np.zeros(d.shape, dtype=bool)
        if self.rx_tx_index is not None:
            rows = np.flatnonzero(self.rx_tx_index >= 0)
            own[rows, self.rx_tx_index[rows]] = True
        if np.any((d == 0.0) & ~own):
            raise DegenerateGeometryError("coincident transmitter/receiver positions")
        with np.errstate(divide="ignore"):
            gains = env.pt_w * d ** (-env.alpha)
        gains[own] = 0.0
        return gains


@dataclass(frozen=True)
class FadingDraw:
    """One realization of per-pair fading power h and shadowing factor g."""

    h: np.ndarray = field(repr=False)  # (..., L, T)
    g: np.ndarray = field(repr=False)  # (..., L, T)


def sample_fading(
    links: ActiveLinkSet,
    env: ChannelEnv,
    rng: np.random.Generator,
    n_samples: int | None = None,
) -> FadingDraw:
    """Draw i.i.d. Rayleigh power and unit-mean log-normal shadowing per pair.

    Draws are generated in single precision: the Monte-Carlo standard error
    dwarfs float32 rounding, and generation cost roughly halves.
    """
    shape = (links.n_links, links.n_tx)
    if n_samples is not None:
        shape = (n_samples,) + shape
    if env.rayleigh:
        h = rng.standard_exponential(size=shape, dtype=np.float32)
    else:
        h = np.ones(shape, dtype=np.float32)
    if env.shadow_sigma_db > 0:
        sigma_ln = env.shadow_sigma_db * LN10_OVER_10
        x = rng.standard_normal(size=shape, dtype=np.float32)
        g = np.exp(x * np.float32(sigma_ln) - np.float32(0.5 * sigma_ln**2))
    else:
        g = np.ones(shape, dtype=np.float32)
    return FadingDraw(h=h, g=g)


def _signal_and_interference(links, env, draw):
    """Per-sample own-link power and summed interference, shapes (..., L).

    The heavy (..., L, T) product runs in the draw's dtype; the reduced
    (..., L) results are returned in float64.
    """
    gains = links.gain_matrix(env).astype(draw.h.dtype, copy=False)
    received = gains * draw.h * draw.g        # (..., L, T)
    idx = np.arange(links.n_links)
    own = received[..., idx, links.link_tx].astype(np.float64)
    interference = received.sum(axis=-1, dtype=np.float64) - own
    return own, interference


def sinr_samples(
    links: ActiveLinkSet,
    env: ChannelEnv,
    draw: FadingDraw,
    with_self_interference: bool = True,
) -> np.ndarray:
    """SINR of every link for every sample in the draw, shape (..., L).

    with_self_interference=False zeroes the chi flags, which is the matched
    half-duplex evaluation on common random numbers.
    """
    own, interference = _signal_and_interference(links, env, draw)
    denom = env.sigma2_w + interference
    if with_self_interference:
        denom = denom + links.rx_transmitting * (env.beta * env.pt_w)
    return own / denom


def sinr(
    link_index: int,
    links: ActiveLinkSet,
    env: ChannelEnv,
    draw: FadingDraw,
) -> float:
    """SINR of one link under a single fading draw."""
    return float(sinr_samples(links, env, draw)[..., link_index])


def ergodic_capacities(
    links: ActiveLinkSet,
    env: ChannelEnv,
    n_samples: int,
    rng: np.random.Generator,
    with_self_interference: bool = True,
    draw: FadingDraw | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Monte-Carlo W*E[log2(1+SINR)] for all links, with standard errors.

    Positions stay fixed; only fading and shadowing are redrawn.  Passing an
    explicit draw (shape (S, L, T)) reuses common random numbers.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if draw is None:
        draw = sample_fading(links, env, rng, n_samples)
    rates = np.log2(1.0 + sinr_samples(links, env, draw, with_self_interference))
    caps = env.bandwidth_hz * rates.mean(axis=0)
    if n_samples > 1:
        stderr = env.bandwidth_hz * rates.std(axis=0, ddof=1) / math.sqrt(n_samples)
    else:
        stderr = np.zeros_like(caps)
    return caps, stderr


def ergodic_capacity(
    link_index: int,
    links: ActiveLinkSet,
    env: ChannelEnv,
    n_samples: int,
    rng: np.random.Generator,
) -> tuple[float, float]:
    """Ergodic capacity estimate and standard error for one link, in bits/s."""
    caps, stderr = ergodic_capacities(links, env, n_samples, rng)
    return float(caps[link_index]), float(stderr[link_index])


def ergodic_capacity_pair(
    links: ActiveLinkSet,
    env: ChannelEnv,
    n_samples: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """All-link capacities with and without self-interference, one shared draw.

    Returns (caps_fd, caps_hd): the same fading/shadowing realizations and the
    same concurrent-transmitter set, differing only in the chi * beta * Pt
    term, which is the matched FD-vs-HD comparison on common random numbers.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    draw = sample_fading(links, env, rng, n_samples)
    own, interference = _signal_and_interference(links, env, draw)
    base = env.sigma2_w + interference
    si = links.rx_transmitting * (env.beta * env.pt_w)
    caps_fd = env.bandwidth_hz * np.log2(1.0 + own / (base + si)).mean(axis=0)
    caps_hd = env.bandwidth_hz * np.log2(1.0 + own / base).mean(axis=0)
    return caps_fd, caps_hd


def single_link_set(tx_pos, rx_pos, rx_transmitting: bool = False) -> ActiveLinkSet:
    """Convenience: one transmitter, one receiver, no external interferers."""
    return ActiveLinkSet(
        tx_positions=np.asarray([tx_pos], dtype=np.float64),
        link_tx=np.asarray([0]),
        rx_positions=np.asarray([rx_pos], dtype=np.float64),
        rx_transmitting=np.asarray([rx_transmitting]),
    )
