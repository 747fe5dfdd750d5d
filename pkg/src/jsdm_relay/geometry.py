"""Cell geometry: association rules, association probabilities and the
polar description of the pico-served region.

Angles are measured at the macro BS; the pico BS sits at distance ``d_ms``
on the AoA of its group.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .params import CellLayout, ConfigError, OneRingGroup, SystemParams


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class PolarPoint:
    l: float
    beta: float


def dist_user_pico(l, beta, layout: CellLayout, pico_aoa: float):
    """Distance from ``(l, beta)`` to the pico BS.

    Works elementwise on arrays.
    """
    off = np.asarray(beta) - pico_aoa
    return np.hypot(np.asarray(l) - layout.d_ms * np.cos(off), layout.d_ms * np.sin(off))


def is_pico_associated(l, beta, layout: CellLayout, pico_aoa: float, rule: str = "relay"):
    """Association test for points of the pico group.

    ``rule="relay"`` is the relay-aware rule: the user picks the pico BS when
    the weaker of the two relay hops still beats its direct macro link.  With
    the pico radius convention this is ``d_mu >= d_ms`` and ``d_su <= r``.
    ``rule="pathloss"`` is the smallest-path-loss rule, i.e. the pico disk.
    """
    if not layout.has_pico:
        return np.zeros(np.broadcast(np.asarray(l), np.asarray(beta)).shape, dtype=bool)
    inside = dist_user_pico(l, beta, layout, pico_aoa) <= layout.r
    if rule == "pathloss":
        return inside
    if rule == "relay":
        return inside & (np.asarray(l) >= layout.d_ms)
    raise ValueError(f"unknown association rule {rule!r}")


def is_pico_associated_pathloss(l, beta, layout: CellLayout, pico_aoa: float,
                                params: SystemParams):
    """Relay rule evaluated literally on path loss instead of the radius.

    ``min(P_m d_ms^-a, P_s d_su^-a) >= P_m d_mu^-a``; the common ``kappa^2``
    cancels.
    """
    a = params.alpha
    d_su = dist_user_pico(l, beta, layout, pico_aoa)
    l = np.asarray(l, dtype=float)
    with np.errstate(divide="ignore"):
        direct = params.P_m * l ** (-a)
        relay = np.minimum(params.P_m * layout.d_ms ** (-a), params.P_s * d_su ** (-a))
    return relay >= direct


def disk_within_relay_rule(layout: CellLayout, params: SystemParams, n: int = 4001) -> bool:
    """Check that the pico-served region under the radius convention lies
    inside the exact path-loss region (sampled on its boundary arc)."""
    th0 = pico_half_angle(layout)
    betas = np.linspace(-th0, th0, n)
    upper = layout.d_ms * np.cos(betas) + np.sqrt(
        np.clip(layout.r ** 2 - (layout.d_ms * np.sin(betas)) ** 2, 0, None))
    ls = np.concatenate([upper, np.full(n, layout.d_ms * (1 + 1e-12))])
    bs = np.concatenate([betas, betas])
    return bool(np.all(is_pico_associated_pathloss(ls, bs, layout, 0.0, params)))


def chord_half_angle(layout: CellLayout) -> float:
    """``theta = arcsin(r / 2 d_ms)``."""
    if layout.r > 2 * layout.d_ms:
        raise ConfigError("pico radius exceeds 2 d_ms")
    return math.asin(layout.r / (2.0 * layout.d_ms))


def pico_half_angle(layout: CellLayout) -> float:
    """``theta_0 = 2 theta``: angular half-width of the pico-served region."""
    return 2.0 * chord_half_angle(layout)


def pico_region_upper(beta, layout: CellLayout, pico_aoa: float = 0.0):
    """Outer radius ``l_1(beta)`` of the pico-served region.

    The region is ``d_ms <= l <= l_1(beta)`` for ``|beta - pico_aoa| <= theta_0``.

    Raises
    ------
    DomainError
        If some ``beta`` lies outside the angular support.
    """
    th0 = pico_half_angle(layout)
    off = np.asarray(beta, dtype=float) - pico_aoa
    if np.any(np.abs(off) > th0 * (1 + 1e-12)):
        raise DomainError("beta outside the pico-served angular range")
    s = layout.d_ms * np.sin(off)
    return layout.d_ms * np.cos(off) + np.sqrt(np.clip(layout.r ** 2 - s * s, 0.0, None))


def region_is_clipped(layout: CellLayout, group: OneRingGroup) -> bool:
    """True when the pico disk leaves the cell or the group wedge."""
    if not layout.has_pico:
        return False
    return (layout.d_ms + layout.r > layout.R * (1 + 1e-12)
            or pico_half_angle(layout) > group.spread * (1 + 1e-12))


@dataclass(frozen=True)
class AssociationSplit:
    """Association probabilities of a user of the pico group.

    ``upsilon`` is the probability mass of the macro-served part of the pico
    group, with users spread uniformly over all group wedges.
    """

    p_gm: float
    p_gs: float
    theta: float
    theta0: float
    upsilon: float
    group_share: float
    clipped: bool = False


def p_gs_closed_form(layout: CellLayout, group: OneRingGroup) -> float:
    t = chord_half_angle(layout)
    r, d, R = layout.r, layout.d_ms, layout.R
    num = r * r * (math.pi / 2 + t + 0.5 * math.sin(2 * t)) - d * d * (2 * t - 0.5 * math.sin(4 * t))
    return num / (group.spread * R * R)


def p_gs_lens_areas(layout: CellLayout, group: OneRingGroup) -> float:
    """Pico disk minus the two circular segments below the arc ``l = d_ms``."""
    t = chord_half_angle(layout)
    phi = math.pi / 2 - t
    r, d, R = layout.r, layout.d_ms, layout.R
    s1 = r * r * phi - 0.5 * r * r * math.sin(2 * phi)
    s2 = d * d * 2 * t - 0.5 * d * d * math.sin(4 * t)
    return (math.pi * r * r - s1 - s2) / (group.spread * R * R)


def chord_integral(layout: CellLayout) -> float:
    """Closed form of ``int 2 d cos(b) sqrt(r^2 - d^2 sin^2 b) db`` over ``|b| <= theta_0``."""
    th0 = pico_half_angle(layout)
    r, d = layout.r, layout.d_ms
    st = math.sin(th0)
    return (2 * d * st * math.sqrt(max(r * r - d * d * st * st, 0.0))
            + 2 * r * r * math.asin(min(d * st / r, 1.0)))


def upsilon_closed_form(layout: CellLayout, group: OneRingGroup, total_spread: float) -> float:
    th0 = pico_half_angle(layout)
    r, d, R = layout.r, layout.d_ms, layout.R
    norm = R * R * total_spread
    return (group.spread / total_spread + d * d * th0 / norm
            - (d * d * math.sin(2 * th0) + 2 * r * r * th0 + chord_integral(layout)) / (2 * norm))


def pico_region_area(layout: CellLayout, group: OneRingGroup) -> float:
    """Area of the pico-served region clipped to the cell and the wedge."""
    if not layout.has_pico:
        return 0.0
    half = min(pico_half_angle(layout), group.spread)

    def strip(b):
        up = min(float(pico_region_upper(b, layout)), layout.R)
        return 0.5 * max(up * up - layout.d_ms ** 2, 0.0)

    area, _ = integrate.quad(strip, -half, half, epsabs=0.0, epsrel=1e-12, limit=200)
    return area


def association_probability(layout: CellLayout, group: OneRingGroup,
                            total_spread: float | None = None,
                            identity_tol: float = 1e-12) -> AssociationSplit:
    """Association split of a user in the pico's group.

    When the pico-served region fits inside the cell and the wedge, ``p_gs``
    comes from the closed form and is cross-checked against the lens-area
    form.  Otherwise the clipped region is integrated numerically.
    """
    if total_spread is None:
        total_spread = group.spread
    share = group.spread / total_spread
    if not layout.has_pico:
        return AssociationSplit(1.0, 0.0, 0.0, 0.0, share, share)
    theta = chord_half_angle(layout)
    if region_is_clipped(layout, group):
        p_gs = pico_region_area(layout, group) / (group.spread * layout.R ** 2)
        return AssociationSplit(1.0 - p_gs, p_gs, theta, 2 * theta, share * (1.0 - p_gs),
                                share, clipped=True)
    p_gs = p_gs_closed_form(layout, group)
    alt = p_gs_lens_areas(layout, group)
    if abs(p_gs - alt) > identity_tol:
        raise ArithmeticError(f"association forms disagree: {p_gs!r} vs {alt!r}")
    upsilon = upsilon_closed_form(layout, group, total_spread)
    return AssociationSplit(1.0 - p_gs, p_gs, theta, 2 * theta, upsilon, share)


def drop_users(num_users: int, groups, rng: np.random.Generator, R: float,
               partition=None):
    """Uniform user positions over the union of group wedges.

    With ``partition=None`` each user's angle is uniform over the union of
    wedges and its group follows from the wedge it lands in.  A fixed
    ``partition`` places ``partition[g]`` users uniformly in wedge ``g``.

    Returns
    -------
    l, beta, group_id : ndarray
    """
    spreads = np.array([g.spread for g in groups])
    if partition is None:
        u = rng.random(num_users) * 2.0 * spreads.sum()
        edges = np.concatenate([[0.0], np.cumsum(2.0 * spreads)])
        group_id = np.clip(np.searchsorted(edges, u, side="right") - 1, 0, len(groups) - 1)
        lo = np.array([g.wedge[0] for g in groups])
        beta = lo[group_id] + (u - edges[group_id])
    else:
        if sum(partition) != num_users:
            raise ValueError("partition does not sum to the number of users")
        group_id = np.repeat(np.arange(len(groups)), partition)
        lo = np.array([g.wedge[0] for g in groups])
        beta = lo[group_id] + 2.0 * spreads[group_id] * rng.random(num_users)
    l = R * np.sqrt(rng.random(num_users))
    return l, beta, group_id
