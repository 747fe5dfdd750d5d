"""Spatial averages of the per-position outage and the cell outage.

Users are uniform over the union of group wedges; in polar coordinates
around the macro BS their density is ``l / (R^2 sum_g Delta_g)``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from math import comb, factorial

import numpy as np
from scipy import integrate
from scipy.integrate import IntegrationWarning

from ..geometry import association_probability, pico_half_angle
from ..params import Scenario
from ..precoding import InfeasibleStreamsError
from .effective import LinkModel
from .outage import MacroLinkConstants, PicoLinkConstants

REGIONS = ("macro-pico-group", "pico", "macro-other")
DEFAULT_RTOL = 1e-5
MAX_COMPOSITIONS = 200_000


class QuadratureError(ArithmeticError):
    def __init__(self, message, estimate=float("nan"), bound=float("nan")):
        super().__init__(f"{message} (estimate {estimate:.6g}, error bound {bound:.3g})")
        self.estimate = estimate
        self.bound = bound


@dataclass(frozen=True)
class Piece:
    """``beta_lo <= beta <= beta_hi``, ``lower(beta) <= l <= upper(beta)``."""

    beta_lo: float
    beta_hi: float
    lower: object
    upper: object


def _const(v):
    return lambda b: v


def region_pieces(region: str, scenario: Scenario, group: int | None = None) -> list:
    """Polar pieces of an association region.

    ``macro-pico-group`` and ``pico`` refer to the pico's group, split at
    ``theta_g +- theta_0`` and ``l = d_ms``.  The pico disk is clipped to the
    cell and the wedge when it sticks out.  ``macro-other`` is the full wedge
    of ``group``.
    """
    lay = scenario.layout
    R = lay.R
    if region == "macro-other":
        lo, hi = scenario.groups[group].wedge
        return [Piece(lo, hi, _const(0.0), _const(R))]
    g = lay.pico_group
    grp = scenario.groups[g]
    lo, hi = grp.wedge
    if not lay.has_pico:
        return [Piece(lo, hi, _const(0.0), _const(R))] if region == "macro-pico-group" else []
    th = grp.aoa
    half = min(pico_half_angle(lay), grp.spread)

    d, r2 = lay.d_ms, lay.r ** 2

    def l1(b):
        # scalar form of pico_region_upper, it sits in the innermost loop
        s = d * math.sin(b - th)
        return min(d * math.cos(b - th) + math.sqrt(max(r2 - s * s, 0.0)), R)

    if region == "pico":
        return [Piece(th - half, th + half, _const(lay.d_ms), l1)]
    if region == "macro-pico-group":
        pieces = [
            Piece(th - half, th + half, l1, _const(R)),
            Piece(th - half, th + half, _const(0.0), _const(lay.d_ms)),
        ]
        if half < grp.spread:
            pieces.insert(0, Piece(lo, th - half, _const(0.0), _const(R)))
            pieces.append(Piece(th + half, hi, _const(0.0), _const(R)))
        return pieces
    raise ValueError(f"unknown region {region!r}")


def _quad(f, a, b, epsabs, epsrel, points=None, what="integral"):
    if b <= a:
        return 0.0, 0.0
    pts = None
    if points:
        pts = sorted({p for p in points if a < p < b})
        pts = pts or None
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            return integrate.quad(f, a, b, epsabs=epsabs, epsrel=epsrel, points=pts, limit=200)
        except IntegrationWarning as exc:
            warnings.simplefilter("ignore", IntegrationWarning)
            val, err = integrate.quad(f, a, b, epsabs=epsabs, epsrel=epsrel, points=pts,
                                      limit=200)
            if err <= max(epsabs, epsrel * abs(val)) * 10:
                return val, err
            raise QuadratureError(f"{what} did not converge: {exc}", val, err) from None


def integrate_region(f, pieces, norm: float, rtol: float = DEFAULT_RTOL,
                     l_points=None) -> tuple[float, float]:
    """``int int f(l, beta) l dl dbeta / norm`` over the pieces.

    Nested adaptive Gauss-Kronrod; the inner radial integral is resolved
    100x tighter than the outer one.  ``l_points(beta)`` may return radial
    break points.
    """
    total, bound = 0.0, 0.0
    abs_tol = 1e-10 * norm

    for pc in pieces:
        def inner(b, pc=pc):
            lo, hi = pc.lower(b), pc.upper(b)
            if hi <= lo:
                return 0.0
            pts = l_points(b) if l_points else None
            val, _ = _quad(lambda l: f(l, b) * l, lo, hi, abs_tol * 1e-2 / (pc.beta_hi - pc.beta_lo + 1e-300),
                           rtol * 1e-2, pts, "radial integral")
            return val

        val, err = _quad(inner, pc.beta_lo, pc.beta_hi, abs_tol, rtol, what="angular integral")
        total += val
        bound += err
    return total / norm, bound / norm


@lru_cache(maxsize=256)
def region_mass(region: str, scenario: Scenario, group: int | None = None) -> float:
    """Probability that a uniformly dropped user falls in ``region``."""
    norm = scenario.layout.R ** 2 * scenario.total_spread
    mass = 0.0
    for pc in region_pieces(region, scenario, group):
        val, _ = _quad(lambda b: 0.5 * max(pc.upper(b) ** 2 - pc.lower(b) ** 2, 0.0),
                       pc.beta_lo, pc.beta_hi, 0.0, 1e-12)
        mass += val
    return mass / norm


def _macro_l_points(lm, c):
    # the success factor drops on the radial scale (rho Xi_1 / x)^(1/alpha)
    if c.x == 0 or c.xi1 == 0:
        return None
    scale = (lm.rho * c.xi1 / c.x) ** (1.0 / lm.alpha)
    lay = lm.scenario.layout
    th = lm.scenario.pico_aoa

    def pts(b):
        out = [scale, 2.0 * scale]
        if lm.has_pico:
            out.append(lay.d_ms * math.cos(b - th))
        return out

    return pts


def avg_user_outage(region: str, x: float, lm: LinkModel, group: int | None = None,
                    column: int | None = None, rtol: float = DEFAULT_RTOL,
                    ideal_backhaul: bool = False) -> float:
    """Joint probability that a uniformly dropped user lies in ``region`` and
    is in outage at linear threshold ``x``.

    Parameters
    ----------
    region : {"macro-pico-group", "pico", "macro-other"}
    group, column : int
        Serving beam for the macro regions (``group`` defaults to the pico's
        group for ``macro-pico-group``).
    """
    sc = lm.scenario
    lay = sc.layout
    norm = lay.R ** 2 * sc.total_spread
    if region == "macro-pico-group":
        group = lay.pico_group
    pieces = region_pieces(region, sc, group)
    mass = region_mass(region, sc, group)
    if x < 0 or math.isnan(x):
        raise ValueError("SINR threshold must be non-negative")
    if not pieces or mass == 0 or x == 0:
        # Pr(SINR > 0) = 1 pointwise
        return 0.0
    th = sc.pico_aoa
    d_ms = lay.d_ms
    if region == "pico":
        c = PicoLinkConstants(lm, x, ideal_backhaul)
        if c.backhaul == 0:
            return mass

        def f(l, b):
            d_sk = math.hypot(l - d_ms * math.cos(b - th), d_ms * math.sin(b - th))
            return float(c.access_success(l, d_sk))

        val, _ = integrate_region(f, pieces, norm, rtol)
        return min(max(mass - c.backhaul * val, 0.0), mass)

    if column is None:
        raise ValueError("macro regions need the serving beam column")
    c = MacroLinkConstants(lm, group, column, x)
    coef = c.coefficient
    if coef == 0:
        return mass
    a = lm.alpha
    sp = c.pico_scale

    def f(l, b):
        if l == 0:
            return 1.0 if c.x == 0 else 0.0
        mu1 = c.xi1 * l ** (-a)
        e = math.exp(-c.x / (c.rho * mu1))
        if sp and e > 0.0:
            dp = math.hypot(l - d_ms * math.cos(b - th), d_ms * math.sin(b - th)) ** a
            e *= mu1 * dp / (mu1 * dp + c.x * sp)
        return e

    val, _ = integrate_region(f, pieces, norm, rtol, _macro_l_points(lm, c))
    return min(max(mass - coef * val, 0.0), mass)


@dataclass(frozen=True)
class CellBreakdown:
    """Per-group ingredients of the cell outage at one threshold."""

    outage: float
    p_gs: float
    macro_pico_group: tuple
    pico: float
    macro_other: dict


def _conditional(joint, mass):
    return joint / mass if mass > 0 else 0.0


def cell_outage_breakdown(x: float, lm: LinkModel, rtol: float = DEFAULT_RTOL,
                          weighting: str = "conditional") -> CellBreakdown:
    """Mean per-user outage for the fixed partition of ``lm``.

    The pico group contributes a binomial mixture over the number ``i`` of
    its users that associate with the pico BS.  Users are exchangeable, so a
    macro-served slot takes the average over the group's user beams.

    ``weighting="conditional"`` divides each region average by its region
    mass, making every term a conditional outage probability;
    ``weighting="joint"`` plugs the joint region averages in unnormalized.
    """
    if weighting not in ("conditional", "joint"):
        raise ValueError("weighting must be 'conditional' or 'joint'")
    sc = lm.scenario
    K = lm.K
    if K == 0:
        raise ValueError("partition has no users")
    gp = sc.layout.pico_group
    split = association_probability(sc.layout, sc.groups[gp], sc.total_spread)
    p_gm, p_gs = split.p_gm, split.p_gs

    def norm_term(joint, mass):
        return _conditional(joint, mass) if weighting == "conditional" else joint

    total = 0.0
    macro_terms = ()
    pico_term = 0.0
    K_g = lm.partition[gp]
    if K_g:
        m_mass = region_mass("macro-pico-group", sc)
        macro_terms = tuple(
            norm_term(avg_user_outage("macro-pico-group", x, lm, gp, col, rtol), m_mass)
            for col in lm.user_columns(gp))
        mean_macro = float(np.mean(macro_terms))
        if lm.has_pico and p_gs > 0:
            pico_term = norm_term(avg_user_outage("pico", x, lm, rtol=rtol),
                                  region_mass("pico", sc))
        for i in range(K_g + 1):
            w = comb(K_g, i) * p_gm ** (K_g - i) * p_gs ** i
            total += w * ((K_g - i) * mean_macro + i * pico_term)
    others = {}
    for g, K_o in enumerate(lm.partition):
        if g == gp or K_o == 0:
            continue
        mass = region_mass("macro-other", sc, g)
        terms = [norm_term(avg_user_outage("macro-other", x, lm, g, col, rtol), mass)
                 for col in lm.user_columns(g)]
        others[g] = tuple(terms)
        total += sum(terms)
    return CellBreakdown(total / K, p_gs, macro_terms, pico_term, others)


def cell_outage_fixed(partition, x: float, scenario: Scenario, interference: bool = True,
                      rtol: float = DEFAULT_RTOL, weighting: str = "conditional",
                      link_model: LinkModel | None = None) -> float:
    """Cell outage (mean per-user outage) for a fixed user partition."""
    lm = link_model or LinkModel(scenario, partition, interference)
    return cell_outage_breakdown(x, lm, rtol, weighting).outage


def compositions(K: int, G: int):
    """All ordered tuples of ``G`` non-negative integers summing to ``K``."""
    count = comb(K + G - 1, G - 1)
    if count > MAX_COMPOSITIONS:
        raise OverflowError(f"{count} compositions; use the Monte Carlo estimator instead")
    for cut in product(range(K + 1), repeat=G - 1):
        if sum(cut) <= K:
            yield tuple(cut) + (K - sum(cut),)


def composition_weights(K: int, shares) -> dict:
    """Multinomial probability of every composition under i.i.d. group draws."""
    shares = list(shares)
    out = {}
    for comp in compositions(K, len(shares)):
        coef = factorial(K)
        for k in comp:
            coef //= factorial(k)
        out[comp] = coef * math.prod(p ** k for p, k in zip(shares, comp))
    return out


def cell_outage_random(K: int, x, scenario: Scenario, interference: bool = True,
                       rtol: float = DEFAULT_RTOL, on_infeasible: str = "raise",
                       weighting: str = "conditional", cache: dict | None = None):
    """Cell outage averaged over random group membership of ``K`` users.

    ``x`` may be a scalar or a sequence of thresholds.  Infeasible
    compositions raise by default; ``on_infeasible="condition"`` drops them
    and renormalizes the remaining weights (the dropped mass is returned in
    the second element).

    Returns
    -------
    outage : float or ndarray
    dropped_mass : float
    """
    if on_infeasible not in ("raise", "condition"):
        raise ValueError("on_infeasible must be 'raise' or 'condition'")
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    shares = [g.spread / scenario.total_spread for g in scenario.groups]
    weights = composition_weights(K, shares)
    acc = np.zeros_like(xs)
    used = 0.0
    cache = {} if cache is None else cache
    for comp, w in weights.items():
        try:
            lm = cache.get(comp) or LinkModel(scenario, comp, interference)
        except InfeasibleStreamsError:
            if on_infeasible == "raise":
                raise
            continue
        cache[comp] = lm
        used += w
        acc += w * np.array([cell_outage_breakdown(xi, lm, rtol, weighting).outage for xi in xs])
    if used == 0:
        raise InfeasibleStreamsError("no feasible composition")
    acc /= used
    result = acc if np.ndim(x) else float(acc[0])
    return result, 1.0 - used
