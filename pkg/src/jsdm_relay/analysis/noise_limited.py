"""Closed forms of the region-averaged outage when interference is absent.

Without interference every effective matrix has rank one, so the success
probability of a macro user is ``exp(-a l^alpha)`` with
``a = x / (rho b^H R b)`` and the radial integral reduces to a lower
incomplete gamma function.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from ..geometry import pico_half_angle, pico_region_upper
from .averaging import DEFAULT_RTOL, _quad, integrate_region, region_mass, region_pieces
from .effective import LinkModel
from .special import radial_moment


@dataclass(frozen=True)
class NoiseLimitedTerms:
    """Joint region-outage probabilities at one threshold.

    ``macro_pico_group[k]`` and ``macro_other[g][k]`` follow the user beam
    order of the link model.
    """

    macro_pico_group: tuple
    pico: float
    macro_other: dict


def beam_exponent(x: float, lm: LinkModel, group: int, column: int) -> float:
    """``a_gk = x / (rho b_gk^H R_g b_gk)``."""
    return x / (lm.rho * lm.beam_gain(group, column))


def macro_pico_group_term(x: float, lm: LinkModel, column: int,
                          rtol: float = 1e-6) -> float:
    sc = lm.scenario
    lay = sc.layout
    g = lay.pico_group
    grp = sc.groups[g]
    norm = lay.R ** 2 * sc.total_spread
    mass = region_mass("macro-pico-group", sc)
    if x == 0:
        return 0.0
    a = beam_exponent(x, lm, g, column)
    al = lm.alpha
    if not lay.has_pico:
        return mass - 2 * grp.spread * radial_moment(lay.R, a, al) / norm
    half = min(pico_half_angle(lay), grp.spread)

    def outer(b):
        return radial_moment(min(float(pico_region_upper(b, lay, 0.0)), lay.R), a, al)

    arc, _ = _quad(outer, -half, half, 0.0, rtol * 1e-2)
    covered = (2 * grp.spread * radial_moment(lay.R, a, al)
               + 2 * half * radial_moment(lay.d_ms, a, al) - arc)
    return mass - covered / norm


def pico_term(x: float, lm: LinkModel, rtol: float = 1e-6) -> float:
    sc = lm.scenario
    lay = sc.layout
    if not lay.has_pico:
        return 0.0
    mass = region_mass("pico", sc)
    if x == 0:
        return 0.0
    norm = lay.R ** 2 * sc.total_spread
    p = sc.params
    backhaul = math.exp(-x / (lm.rho * lay.d_ms ** (-lm.alpha) * lm.beam_gain(lay.pico_group, 0)))
    al = lm.alpha
    d = lay.d_ms
    th = sc.pico_aoa

    def f(l, b):
        d_sk = math.hypot(l - d * math.cos(b - th), d * math.sin(b - th))
        return math.exp(-x * p.N0 * d_sk ** al / p.pico_gain)

    val, _ = integrate_region(f, region_pieces("pico", sc), norm, rtol)
    return mass - backhaul * val


def macro_other_term(x: float, lm: LinkModel, group: int, column: int) -> float:
    sc = lm.scenario
    lay = sc.layout
    share = sc.groups[group].spread / sc.total_spread
    if x == 0:
        return 0.0
    a = beam_exponent(x, lm, group, column)
    norm = lay.R ** 2 * sc.total_spread
    return share - 2 * sc.groups[group].spread * radial_moment(lay.R, a, lm.alpha) / norm


def noise_limited_curves(x: float, lm: LinkModel, rtol: float = 1e-6) -> NoiseLimitedTerms:
    """The three region-averaged outage terms in closed form (plus one
    remaining angular integral, and a 2-D integral for the pico region)."""
    if x < 0:
        raise ValueError("SINR threshold must be non-negative")
    sc = lm.scenario
    gp = sc.layout.pico_group
    macro = tuple(macro_pico_group_term(x, lm, col, rtol) for col in lm.user_columns(gp))
    pico = pico_term(x, lm, rtol)
    others = {g: tuple(macro_other_term(x, lm, g, col) for col in lm.user_columns(g))
              for g in range(len(sc.groups)) if g != gp and lm.partition[g]}
    return NoiseLimitedTerms(macro, pico, others)


def noise_limited_cell_outage(x: float, lm: LinkModel, rtol: float = 1e-6) -> float:
    """Cell outage assembled from the noise-limited terms, conditional weighting."""
    from ..geometry import association_probability

    sc = lm.scenario
    gp = sc.layout.pico_group
    t = noise_limited_curves(x, lm, rtol)
    split = association_probability(sc.layout, sc.groups[gp], sc.total_spread)
    total = 0.0
    K_g = lm.partition[gp]
    if K_g:
        m_mass = region_mass("macro-pico-group", sc)
        mean_macro = sum(t.macro_pico_group) / K_g / m_mass
        p_mass = region_mass("pico", sc)
        pico = t.pico / p_mass if p_mass > 0 else 0.0
        total += K_g * (split.p_gm * mean_macro + split.p_gs * pico)
    for g, terms in t.macro_other.items():
        total += sum(terms) / region_mass("macro-other", sc, g)
    return total / lm.K
