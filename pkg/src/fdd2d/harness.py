"""Experiment orchestration: drops, sweeps, seeding, scenario catalog.

One drop realizes positions, clusters, caches, requests, the request graph
and (when rate/latency metrics are requested) transmitter establishment plus
the fading Monte-Carlo.  Drops are independent; the seed of drop d at sweep
point p is SeedSequence([master_seed, p, d]), so results do not depend on
worker count or execution order.

Mode statistics average per-cluster mode fractions over the full (untrun-
cated) clusters, whose occupancy follows the Binomial(n, l^2/2a^2) law the
closed-form probabilities are built on; truncated edge clusters still host
users, links and interference.  Rate metrics report the realized cluster sum
throughput of established nodes averaged over all clusters, FD and HD
evaluated on common random numbers with matched establishment.  Download
metrics combine each established node's incoming transfer with its slowest
outgoing transfer (overlapped for FD, serialized for HD).
"""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channel import ActiveLinkSet, ergodic_capacity_pair
from .config import ConfigError, ScenarioConfig, validate
from .graph import (
    FD_MODES,
    NO_SERVER,
    Mode,
    build_request_graph,
    classify_modes,
    establish_nodes,
)
from .metrics import download_times_tnfd, node_capacity
from .placement import place_caches
from .popularity import build_library, sample_requests
from .results import (
    ALL_METRICS,
    DOWNLOAD_METRICS,
    PROB_METRICS,
    RATE_METRICS,
    ResultRow,
    ResultTable,
)
from .topology import assign_clusters, place_users


@dataclass
class DropResult:
    """Per-drop aggregates consumed by the metric reducers."""

    fd_frac: float = 0.0
    hd_frac: float = 0.0
    self_frac: float = 1.0
    rate_fd: float | None = None
    rate_hd: float | None = None
    downloads: list | None = None   # [(d_fd, d_hd), ...] per established node
    outages: int = 0


def drop_rng(master_seed: int, point_index: int, drop_index: int) -> np.random.Generator:
    """The fixed seed-splitting rule shared by serial and parallel execution."""
    return np.random.default_rng(
        np.random.SeedSequence([master_seed, point_index, drop_index])
    )


def run_drop(
    config: ScenarioConfig,
    rng: np.random.Generator,
    with_channel: bool = False,
) -> DropResult:
    """Execute one Monte-Carlo drop at a concrete (n, l) configuration."""
    library = build_library(config.m, config.gamma_r, rng,
                            config.file_min_mb, config.file_max_mb)
    deployment = assign_clusters(place_users(config.n, config.a_km, rng), config.l_km)
    caches = place_caches(deployment, library, config.h, rng)
    requests = sample_requests(library, config.n, rng)
    graph = build_request_graph(deployment, caches, requests, config.l_km)
    modes = classify_modes(graph)

    result = DropResult()
    n_clusters = deployment.n_clusters
    full_ids = np.flatnonzero(deployment.full_cluster_mask())
    occupancy = deployment.occupancy_counts()[full_ids]
    fd_users = np.isin(modes, FD_MODES)
    hd_users = modes == Mode.HD_TX
    fd_counts = np.bincount(deployment.cluster_of[fd_users], minlength=n_clusters)[full_ids]
    hd_counts = np.bincount(deployment.cluster_of[hd_users], minlength=n_clusters)[full_ids]
    occupied = occupancy > 0
    fd_frac = np.where(occupied, fd_counts / np.maximum(occupancy, 1), 0.0)
    hd_frac = np.where(occupied, hd_counts / np.maximum(occupancy, 1), 0.0)
    result.fd_frac = float(fd_frac.mean())
    result.hd_frac = float(hd_frac.mean())
    result.self_frac = 1.0 - result.fd_frac - result.hd_frac

    if with_channel:
        _channel_pass(config, deployment, caches, graph, requests, library, rng, result)
    return result


def _channel_pass(config, deployment, caches, graph, requests, library, rng, result):
    """Establish transmitters, run the fading Monte-Carlo, fill rate/latency.

    Active links are every established node's outgoing edges plus, for each
    established node that is served inside its cluster, the single incoming
    edge from its server: that server transmits this one link even when not
    established itself (it is part of the established node's FD pattern).
    The concurrent-transmitter set is the same for the FD and HD accounting;
    HD differs only by dropping self-interference and the in-link credit.
    """
    result.rate_fd = 0.0
    result.rate_hd = 0.0
    result.downloads = []
    psi = establish_nodes(graph, caches, config.tau)
    established = sorted(u for users in psi.values() for u in users)
    if not established:
        return
    established_set = set(established)
    transmitters = sorted(
        established_set
        | {int(graph.server_of[u]) for u in established
           if graph.server_of[u] != NO_SERVER}
    )
    tx_index = {u: t for t, u in enumerate(transmitters)}
    link_tx, rx_users = [], []
    out_links_of = {u: [] for u in established}
    for u in established:
        for r in graph.out_of[u]:
            out_links_of[u].append(len(link_tx))
            link_tx.append(tx_index[u])
            rx_users.append(r)
    for u in established:
        s = int(graph.server_of[u])
        if s != NO_SERVER and s not in established_set:
            link_tx.append(tx_index[s])
            rx_users.append(u)
    in_link_of = {r: i for i, r in enumerate(rx_users)}  # in-degree <= 1
    rx_tx_index = np.asarray([tx_index.get(r, -1) for r in rx_users], dtype=np.int64)
    links = ActiveLinkSet(
        tx_positions=deployment.positions[transmitters],
        link_tx=np.asarray(link_tx, dtype=np.int64),
        rx_positions=deployment.positions[rx_users],
        rx_transmitting=rx_tx_index >= 0,
        rx_tx_index=rx_tx_index,
    )
    env = config.channel_env()
    caps_fd, caps_hd = ergodic_capacity_pair(links, env, config.fading_samples, rng)

    eta_fd = np.zeros(deployment.n_clusters)
    eta_hd = np.zeros(deployment.n_clusters)
    bits = library.sizes_bits
    for u in established:
        out_idx = out_links_of[u]
        in_idx = in_link_of.get(u)
        c_in = float(caps_fd[in_idx]) if in_idx is not None else None
        cid = deployment.cluster_of[u]
        eta_fd[cid] += node_capacity(caps_fd[out_idx], c_in)
        eta_hd[cid] += node_capacity(caps_hd[out_idx])

        link_caps = [float(caps_fd[i]) for i in out_idx]
        if in_idx is not None:
            link_caps.append(c_in)
        if any(c <= 0.0 for c in link_caps):
            result.outages += 1
            continue
        thetas_out = [float(bits[requests[rx_users[i]] - 1]) / float(caps_fd[i])
                      for i in out_idx]
        if in_idx is not None:
            theta_in = float(bits[requests[u] - 1]) / c_in
            d_hd, d_fd = download_times_tnfd(theta_in, thetas_out)
        else:
            d_hd = d_fd = max(thetas_out)
        result.downloads.append((d_fd, d_hd))
    result.rate_fd = float(eta_fd.sum()) / deployment.n_clusters
    result.rate_hd = float(eta_hd.sum()) / deployment.n_clusters


def _drops_task(args):
    config, master_seed, point_index, start, stop, with_channel = args
    return [
        run_drop(config, drop_rng(master_seed, point_index, d), with_channel)
        for d in range(start, stop)
    ]


def run_point(
    config: ScenarioConfig,
    point_index: int,
    with_channel: bool,
    workers: int = 1,
) -> list:
    """All drops of one sweep point, in drop order regardless of worker count."""
    drops = config.drops
    if workers <= 1 or drops < 8:
        return _drops_task((config, config.seed, point_index, 0, drops, with_channel))
    chunk = max(1, math.ceil(drops / (workers * 4)))
    tasks = [
        (config, config.seed, point_index, start, min(start + chunk, drops), with_channel)
        for start in range(0, drops, chunk)
    ]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunks = list(pool.map(_drops_task, tasks))
    return [r for ch in chunks for r in ch]


def _mean_stderr(values) -> tuple[float, float, int]:
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        return float("nan"), float("nan"), 0
    mean = float(arr.mean())
    stderr = float(arr.std(ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else 0.0
    return mean, stderr, int(arr.size)


def reduce_point(drop_results: list, metrics) -> dict:
    """Metric -> (value, stderr, drops_used) for one sweep point."""
    out = {}
    for metric in metrics:
        if metric == "P_FD":
            out[metric] = _mean_stderr([r.fd_frac for r in drop_results])
        elif metric == "P_HD":
            out[metric] = _mean_stderr([r.hd_frac for r in drop_results])
        elif metric == "P_self":
            out[metric] = _mean_stderr([r.self_frac for r in drop_results])
        elif metric == "avg_rate_FD":
            out[metric] = _mean_stderr([r.rate_fd for r in drop_results])
        elif metric == "avg_rate_HD":
            out[metric] = _mean_stderr([r.rate_hd for r in drop_results])
        elif metric == "avg_download_FD":
            out[metric] = _mean_stderr(
                [np.mean([d for d, _ in r.downloads])
                 for r in drop_results if r.downloads]
            )
        elif metric == "avg_download_HD":
            out[metric] = _mean_stderr(
                [np.mean([d for _, d in r.downloads])
                 for r in drop_results if r.downloads]
            )
        elif metric == "outage_frac":
            out[metric] = _mean_stderr(
                [r.outages / (r.outages + len(r.downloads))
                 for r in drop_results if r.downloads is not None
                 and (r.outages + len(r.downloads)) > 0]
            )
        else:
            raise ConfigError(f"unknown metric {metric!r}")
    return out


def run_scenario(
    config: ScenarioConfig,
    metrics=ALL_METRICS,
    workers: int = 1,
) -> ResultTable:
    """Sweep the grid, averaging the requested metrics over config.drops drops."""
    validate(config)
    with_channel = any(m in RATE_METRICS + DOWNLOAD_METRICS for m in metrics)
    sweep_var = config.sweep or "l_km"
    rows = []
    for point_index, value in enumerate(config.sweep_values()):
        point_cfg = config.at_sweep_point(value)
        drop_results = run_point(point_cfg, point_index, with_channel, workers)
        reduced = reduce_point(drop_results, metrics)
        for metric in metrics:
            v, se, used = reduced[metric]
            rows.append(ResultRow(sweep_var, float(value), metric, v, se, used))
    return ResultTable(rows=tuple(rows))


# ---------------------------------------------------------------------------
# scenario catalog

GRID_L = tuple(round(0.05 * i, 2) for i in range(1, 11))
GRID_N = (10, 100, 250, 500, 750, 1000)


@dataclass(frozen=True)
class ScenarioRun:
    label: str
    settings: dict = field(default_factory=dict)
    metrics: tuple = ALL_METRICS


SCENARIOS = {
    "fig2": (
        ScenarioRun("fig2", dict(n=500, h=1, gamma_r=1.6, tau=1,
                                 sweep="l_km", grid=GRID_L), PROB_METRICS),
    ),
    "fig3": (
        ScenarioRun("fig3", dict(gamma_r=1.6, h=5, l_km=0.2, tau=1,
                                 sweep="n", grid=GRID_N), PROB_METRICS),
    ),
    "fig4": (
        ScenarioRun("fig4", dict(n=500, h=1, gamma_r=1.6, tau=1,
                                 sweep="l_km", grid=GRID_L), RATE_METRICS),
    ),
    "fig5": tuple(
        ScenarioRun(f"fig5_tau{t}", dict(n=1000, h=3, gamma_r=1.0, tau=t,
                                         sweep="l_km", grid=GRID_L), RATE_METRICS)
        for t in (1, 2, 3)
    ),
    "fig6": (
        ScenarioRun("fig6", dict(n=500, h=1, gamma_r=1.6, tau=1,
                                 sweep="l_km", grid=GRID_L), DOWNLOAD_METRICS),
    ),
    "custom": (ScenarioRun("custom", {}, ALL_METRICS),),
}


def scenario_runs(name: str, file_settings: dict, overrides: dict) -> list:
    """Materialize a scenario into [(label, config, metrics)], applying
    catalog presets, then config-file values, then CLI overrides."""
    if name not in SCENARIOS:
        raise ConfigError(
            f"unknown scenario {name!r}; available: {', '.join(sorted(SCENARIOS))}"
        )
    runs = []
    for run in SCENARIOS[name]:
        cfg = ScenarioConfig()
        for settings in (run.settings, file_settings, overrides):
            cfg = dataclasses.replace(cfg, **settings)
        if name == "custom" and cfg.sweep is None:
            cfg = dataclasses.replace(cfg, sweep="l_km", grid=(cfg.l_km,))
        runs.append((run.label, cfg, run.metrics))
    return runs
