"""Monte Carlo link-level simulator.

Users are dropped, channels drawn as ``h = U Lambda^{1/2} w`` and every SINR
is computed from the received-signal model directly: desired stream power
over noise, all other macro streams and, for macro-served users, the pico
transmission.  Pico-served users see the minimum of the backhaul SINR at the
pico BS and their own access-link SINR.

Randomness is organized in fixed-size blocks of drops; block ``j`` uses the
stream seeded with ``(seed, j)``, so results do not depend on how blocks are
scheduled.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .channel import DEFAULT_RANK_THRESHOLD, complex_normal, covariance_model
from .geometry import dist_user_pico, drop_users, is_pico_associated
from .params import CellLayout, Scenario
from .precoding import (InfeasibleStreamsError, assign_user_beams, design_bd_precoders,
                        streams_for_partition)

MODES = ("sinr", "snr", "no-pico")


@dataclass(frozen=True)
class TrialConfig:
    """Monte Carlo controls.

    ``mode`` is ``"sinr"`` (full model), ``"snr"`` (all interference removed)
    or ``"no-pico"`` (pico BS absent, everyone served by the macro BS).
    ``rule`` selects the association rule, ``"relay"`` or ``"pathloss"``.
    """

    num_drops: int = 10_000
    channels_per_drop: int = 1
    seed: int = 0
    mode: str = "sinr"
    rule: str = "relay"
    block_size: int = 2000
    max_redraws: int = 1000

    def __post_init__(self):
        if self.num_drops < 1 or self.channels_per_drop < 1 or self.block_size < 1:
            raise ValueError("drop, channel and block counts must be >= 1")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.rule not in ("relay", "pathloss"):
            raise ValueError("rule must be 'relay' or 'pathloss'")


@dataclass(frozen=True)
class TrialRecord:
    sinr: float
    pico_served: bool
    group_id: int
    l: float
    beta: float


@dataclass
class DropBatch:
    """SINRs of ``n`` drops, ``c`` channel draws each, ``K`` users.

    ``sinr`` has shape ``(n, c, K)``; positional arrays are ``(n, K)``.
    """

    sinr: np.ndarray
    pico_served: np.ndarray
    group_id: np.ndarray
    l: np.ndarray
    beta: np.ndarray
    redraws: int = 0


def _effective_scenario(scenario: Scenario, mode: str) -> Scenario:
    if mode == "no-pico":
        lay = scenario.layout
        return replace(scenario, layout=CellLayout(lay.R, 0.0, lay.d_ms, lay.pico_group))
    return scenario


class _Cell:
    """Per-scenario cache of covariances and per-partition beams."""

    def __init__(self, scenario: Scenario, mode: str, rank_threshold=DEFAULT_RANK_THRESHOLD):
        self.scenario = _effective_scenario(scenario, mode)
        self.mode = mode
        self.models = [covariance_model(g, rank_threshold) for g in self.scenario.groups]
        self.has_pico = self.scenario.layout.has_pico
        self.pico_group = self.scenario.layout.pico_group if self.has_pico else None
        self._beams = {}

    def beams(self, partition):
        partition = tuple(int(k) for k in partition)
        if partition not in self._beams:
            try:
                streams = streams_for_partition(partition, self.pico_group)
                P = design_bd_precoders(self.models, streams, pico_group=self.pico_group)
                assign_user_beams(P, partition)
                self._beams[partition] = P
            except InfeasibleStreamsError:
                self._beams[partition] = None
        return self._beams[partition]


def _user_link(cell, P, group, col, l, d_sk, h_pico2, rng, interference):
    """SINR of a macro-served user and of the pico access link for the same user.

    ``l``, ``d_sk`` and ``h_pico2`` are arrays of equal shape.
    """
    p = cell.scenario.params
    a = p.alpha
    rho = p.rho_for(P.total_streams, cell.has_pico)
    model = cell.models[group]
    w = complex_normal(rng, l.shape + (model.rank,))
    h = w @ model.sqrt_factor.T
    proj = np.abs(h.conj() @ P.all_beams) ** 2
    serving = sum(P.stream_counts[:group]) + col
    signal = proj[..., serving]
    total = proj.sum(axis=-1)
    pl = l ** (-a)
    with np.errstate(divide="ignore", over="ignore"):
        pico_rx = (p.pico_gain / p.N0) * d_sk ** (-a) * h_pico2 if cell.has_pico else 0.0
    if interference:
        macro = pl * signal / (1.0 / rho + pl * (total - signal) + pico_rx / rho)
        access = pico_rx / rho / (1.0 / rho + pl * total)
    else:
        macro = pl * signal * rho
        access = pico_rx
    return macro, access


def _backhaul(cell, P, shape, rng, interference):
    p = cell.scenario.params
    rho = p.rho_for(P.total_streams, cell.has_pico)
    g = cell.pico_group
    model = cell.models[g]
    w = complex_normal(rng, shape + (model.rank,))
    h = w @ model.sqrt_factor.T
    proj = np.abs(h.conj() @ P.all_beams) ** 2
    serving = sum(P.stream_counts[:g])
    signal = proj[..., serving]
    pl = cell.scenario.layout.d_ms ** (-p.alpha)
    if interference:
        return pl * signal / (1.0 / rho + pl * (proj.sum(axis=-1) - signal))
    return pl * signal * rho


def _draw_positions(cell, n, K, partition, rng):
    groups = cell.scenario.groups
    R = cell.scenario.layout.R
    if partition is not None:
        cols_l, cols_b, cols_g = [], [], []
        for g, K_g in enumerate(partition):
            if K_g == 0:
                continue
            sub = [0] * len(groups)
            sub[g] = n * K_g
            l, b, gid = drop_users(n * K_g, groups, rng, R, partition=sub)
            cols_l.append(l.reshape(n, K_g))
            cols_b.append(b.reshape(n, K_g))
            cols_g.append(gid.reshape(n, K_g))
        return np.hstack(cols_l), np.hstack(cols_b), np.hstack(cols_g)
    l, b, gid = drop_users(n * K, groups, rng, R)
    l, b, gid = l.reshape(n, K), b.reshape(n, K), gid.reshape(n, K)
    order = np.argsort(gid, axis=1, kind="stable")
    take = lambda arr: np.take_along_axis(arr, order, axis=1)
    return take(l), take(b), take(gid)


def simulate_drops(scenario: Scenario, n: int, rng: np.random.Generator, K: int | None = None,
                   partition=None, mode: str = "sinr", rule: str = "relay",
                   channels_per_drop: int = 1, max_redraws: int = 1000,
                   cell: _Cell | None = None) -> DropBatch:
    """Simulate ``n`` independent drops.

    Either a fixed ``partition`` (users per group) or a user count ``K`` with
    group membership drawn per drop.  Drops whose realized partition cannot
    be served are redrawn; the number of redraws is reported.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    cell = cell or _Cell(scenario, mode)
    if partition is not None:
        partition = tuple(int(k) for k in partition)
        K = sum(partition)
        if cell.beams(partition) is None:
            raise InfeasibleStreamsError(f"partition {partition} cannot be served")
    if not K:
        raise ValueError("need a positive number of users")
    G = len(cell.scenario.groups)
    l, beta, gid = _draw_positions(cell, n, K, partition, rng)
    redraws = 0
    if partition is None:
        for _ in range(max_redraws + 1):
            counts = np.stack([(gid == g).sum(axis=1) for g in range(G)], axis=1)
            bad = np.array([cell.beams(tuple(c)) is None for c in counts])
            if not bad.any():
                break
            nb = int(bad.sum())
            redraws += nb
            l[bad], beta[bad], gid[bad] = _draw_positions(cell, nb, K, None, rng)
        else:
            raise InfeasibleStreamsError("too many infeasible partitions; raise max_redraws")
    counts = np.stack([(gid == g).sum(axis=1) for g in range(G)], axis=1)

    c = channels_per_drop
    lay = cell.scenario.layout
    interference = cell.mode != "snr"
    sinr = np.empty((n, c, K))
    if cell.has_pico:
        d_sk = dist_user_pico(l, beta, lay, cell.scenario.pico_aoa)
        served = (gid == lay.pico_group) & is_pico_associated(l, beta, lay,
                                                              cell.scenario.pico_aoa, rule)
    else:
        d_sk = np.full_like(l, np.inf)
        served = np.zeros_like(l, dtype=bool)

    for part in {tuple(row) for row in counts}:
        rows = np.flatnonzero((counts == part).all(axis=1))
        P = cell.beams(part)
        bmap = assign_user_beams(P, part)
        slot = 0
        backhaul = _backhaul(cell, P, (rows.size, c), rng, interference) if cell.has_pico else None
        for g, K_g in enumerate(part):
            for k in range(K_g):
                col = bmap[(g, k)]
                lu = np.repeat(l[rows, slot][:, None], c, axis=1)
                du = np.repeat(d_sk[rows, slot][:, None], c, axis=1)
                hp = np.abs(complex_normal(rng, (rows.size, c))) ** 2
                macro, access = _user_link(cell, P, g, col, lu, du, hp, rng, interference)
                if cell.has_pico:
                    s = served[rows, slot][:, None]
                    sinr[rows, :, slot] = np.where(s, np.minimum(backhaul, access), macro)
                else:
                    sinr[rows, :, slot] = macro
                slot += 1
    return DropBatch(sinr, served, gid, l, beta, redraws)


def run_drop(config: TrialConfig, scenario: Scenario, rng: np.random.Generator,
             K: int | None = None, partition=None) -> list:
    """One drop, returned as per-user records (first channel draw)."""
    batch = simulate_drops(scenario, 1, rng, K, partition, config.mode, config.rule,
                           config.channels_per_drop, config.max_redraws)
    return [TrialRecord(float(batch.sinr[0, 0, k]), bool(batch.pico_served[0, k]),
                        int(batch.group_id[0, k]), float(batch.l[0, k]),
                        float(batch.beta[0, k]))
            for k in range(batch.sinr.shape[2])]


@dataclass(frozen=True)
class MonteCarloCurve:
    """Empirical outage curve.

    ``probabilities`` is the mean over drops of the fraction of users in
    outage; ``union`` is the probability that at least one user is.
    """

    thresholds_dB: np.ndarray
    probabilities: np.ndarray
    stderr: np.ndarray
    union: np.ndarray
    union_stderr: np.ndarray
    num_drops: int
    redraws: int
    provenance: str = "monte-carlo"


class _Accumulator:
    """Mergeable sums for per-drop statistics."""

    def __init__(self, m):
        self.n = 0
        self.s = np.zeros(m)
        self.s2 = np.zeros(m)
        self.u = np.zeros(m)
        self.u2 = np.zeros(m)

    def add(self, frac, union):
        self.n += frac.shape[0]
        self.s += frac.sum(axis=0)
        self.s2 += (frac ** 2).sum(axis=0)
        self.u += union.sum(axis=0)
        self.u2 += (union ** 2).sum(axis=0)

    def stats(self, s, s2):
        mean = s / self.n
        var = np.maximum(s2 / self.n - mean ** 2, 0.0)
        return mean, np.sqrt(var / max(self.n - 1, 1))


def estimate_outage_curve(config: TrialConfig, scenario: Scenario, thresholds_dB,
                          K: int | None = None, partition=None) -> MonteCarloCurve:
    """Monte Carlo outage curve with standard errors over drops."""
    th = np.asarray(thresholds_dB, dtype=float)
    if np.any(np.diff(th) < 0):
        raise ValueError("thresholds must be sorted")
    x = 10.0 ** (th / 10.0)
    cell = _Cell(scenario, config.mode)
    acc = _Accumulator(th.size)
    redraws = 0
    blocks = math.ceil(config.num_drops / config.block_size)
    for j in range(blocks):
        n = min(config.block_size, config.num_drops - j * config.block_size)
        rng = np.random.default_rng([config.seed, j])
        batch = simulate_drops(scenario, n, rng, K, partition, config.mode, config.rule,
                               config.channels_per_drop, config.max_redraws, cell)
        redraws += batch.redraws
        below = batch.sinr[..., None] < x  # (n, c, K, T)
        frac = below.mean(axis=(1, 2))
        union = below.any(axis=2).mean(axis=1)
        acc.add(frac, union)
    p, se = acc.stats(acc.s, acc.s2)
    u, use = acc.stats(acc.u, acc.u2)
    return MonteCarloCurve(th, p, se, u, use, acc.n, redraws)


def sample_user_sinr(scenario: Scenario, partition, l: float, beta: float, n: int,
                     rng: np.random.Generator, group: int | None = None, user: int = 0,
                     served_by: str = "macro", mode: str = "sinr") -> np.ndarray:
    """SINR samples of one user pinned at ``(l, beta)``.

    ``served_by="macro"`` uses the beam of ``user`` in ``group``;
    ``served_by="pico"`` evaluates the two-hop relay SINR.
    """
    cell = _Cell(scenario, mode)
    P = cell.beams(partition)
    if P is None:
        raise InfeasibleStreamsError(f"partition {tuple(partition)} cannot be served")
    lay = cell.scenario.layout
    if group is None:
        group = lay.pico_group
    col = assign_user_beams(P, partition)[(group, user)] if served_by == "macro" else 0
    interference = mode != "snr"
    lu = np.full(n, float(l))
    d = dist_user_pico(l, beta, lay, cell.scenario.pico_aoa) if cell.has_pico else np.inf
    du = np.full(n, d)
    hp = np.abs(complex_normal(rng, n)) ** 2
    macro, access = _user_link(cell, P, group, col, lu, du, hp, rng, interference)
    if served_by == "macro":
        return macro
    if not cell.has_pico:
        raise ValueError("scenario has no pico BS")
    return np.minimum(_backhaul(cell, P, (n,), rng, interference), access)
